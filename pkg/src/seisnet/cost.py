"""Operational expenditure model for private (LoRa) and cellular (NB-IoT) networks.

Money is held as integer minor units (cents) so totals are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

OMITTED_COSTS_DISCLAIMER = (
    "Maintenance costs such as personnel and vehicles for day-to-day operational "
    "issues are not included; they apply equally to every network option."
)


@dataclass(frozen=True)
class CostModel:
    node_count: int = 0
    node_unit_price: int = 0
    gateway_count: int = 0
    gateway_unit_price: int = 0
    extra_mast_count: int = 0
    mast_unit_price: int = 0
    subscription_per_node_year: int = 0
    years: int = 1
    name: str = ""

    def __post_init__(self) -> None:
        for f in fields(self):
            if f.name == "name":
                continue
            value = getattr(self, f.name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(f"{f.name} must be an integer (minor units for prices)")
            if value < 0:
                raise ValueError(f"{f.name} must be >= 0")
        if self.years < 1:
            raise ValueError("years must be >= 1")


def total_opex(m: CostModel) -> int:
    return (m.node_count * m.node_unit_price
            + m.gateway_count * m.gateway_unit_price
            + m.extra_mast_count * m.mast_unit_price
            + m.years * m.node_count * m.subscription_per_node_year)


def dollars(amount: int) -> int:
    """Whole currency units to cents."""
    return amount * 100


def format_money(cents: int, symbol: str = "$") -> str:
    whole, frac = divmod(cents, 100)
    return f"{symbol}{whole:,}" + (f".{frac:02d}" if frac else "")


def lora_model(node_count: int = 1600, gateway_count: int = 45, years: int = 1) -> CostModel:
    return CostModel(node_count, dollars(10), gateway_count, dollars(1000),
                     years=years, name="LoRa")


def nbiot_model(node_count: int = 1600, extra_masts: int = 5, years: int = 1) -> CostModel:
    return CostModel(node_count, dollars(5), 0, 0, extra_masts, dollars(20_000),
                     dollars(30), years, name="NB-IoT")
