import pytest

from seisnet.cost import CostModel, dollars, format_money, lora_model, nbiot_model, total_opex


def test_lora_opex():
    assert total_opex(lora_model()) == dollars(61_000)


def test_nbiot_opex():
    assert total_opex(nbiot_model()) == dollars(156_000)


def test_zero_model():
    assert total_opex(CostModel()) == 0


def test_multi_year_subscription():
    one, five = nbiot_model(years=1), nbiot_model(years=5)
    assert total_opex(five) == total_opex(one) + 4 * 1600 * dollars(30)


def test_formatting():
    assert format_money(dollars(61_000)) == "$61,000"
    assert format_money(12_345) == "$123.45"


@pytest.mark.parametrize("bad", [dict(node_count=-1), dict(years=0), dict(node_unit_price=1.5)])
def test_invariants(bad):
    with pytest.raises((ValueError, TypeError)):
        CostModel(**bad)
