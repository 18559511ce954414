import math

import pytest

from seisnet.topology import (Architecture, Gateway, Region, explicit_nodes, gateway_count,
                              grid_nodes, plan_network)


@pytest.mark.parametrize("w, h, s, n", [(40, 40, 1, 1600), (6, 6, 6, 1), (40, 40, 7, 36)])
def test_grid_node_counts(w, h, s, n):
    assert len(grid_nodes(Region(w, h), s)) == n


def test_grid_is_row_major_and_inside_region():
    layout = grid_nodes(Region(10, 8), 4.1)
    assert layout.positions[0] == (2.05, 2.05)
    assert layout.positions[1][1] == layout.positions[0][1]
    assert all(0 <= x <= 10 and 0 <= y <= 8 for x, y in layout.positions)


def test_spacing_larger_than_region_rejected():
    with pytest.raises(ValueError):
        grid_nodes(Region(5, 5), 6)


@pytest.mark.parametrize("w, h, s, n", [(40, 40, 6, 45), (40, 40, 40, 1), (30, 40, 6, 34)])
def test_gateway_count(w, h, s, n):
    assert gateway_count(Region(w, h), s) == n


def test_groningen_plan():
    nodes = grid_nodes(Region(40, 40), 1)
    plan = plan_network("hybrid", nodes, 6, 10_770, 6, 1e6)
    assert plan.estimate_gateway_count == 45
    assert len(plan.gateways) == 49  # ceil(40/6) squared
    assert plan.uncovered == [] and plan.overloaded == []
    assert sum(plan.per_gateway_load) == pytest.approx(1600 * 10_770, rel=1e-12)
    assert plan.estimate_mean_load == pytest.approx(383_000, rel=1e-3)
    assert any("49" in n for n in plan.notes)


def test_single_node_single_gateway():
    nodes = explicit_nodes(Region(6, 6), [(3, 3)])
    plan = plan_network(Architecture.CELLULAR, nodes, 6, 500, 1, 1000)
    assert plan.link_distance == [0.0]
    assert plan.per_gateway_load == [500]


def test_short_range_leaves_nodes_uncovered():
    nodes = grid_nodes(Region(40, 40), 1)
    plan = plan_network("hybrid", nodes, 6, 100, 0.1, 1e9)
    assert len(plan.uncovered) > 1500
    assert sum(plan.per_gateway_load) == pytest.approx(100 * (1600 - len(plan.uncovered)))


def test_zero_capacity_flags_every_loaded_gateway():
    plan = plan_network("hybrid", grid_nodes(Region(12, 12), 1), 6, 100, 10, 0)
    assert plan.overloaded == list(range(len(plan.gateways)))


def test_nearest_assignment_brute_force():
    nodes = grid_nodes(Region(13, 9), 0.7)
    extra = [Gateway(0.2, 8.8), Gateway(12.0, 0.5)]
    plan = plan_network("hybrid", nodes, 4, 1, 100, 1e9, extra)
    gws = plan.gateways
    for (x, y), j in zip(nodes.positions, plan.assignment):
        d = [math.hypot(x - g.x, y - g.y) for g in gws]
        assert d[j] == min(d)
        assert j == d.index(min(d))  # lowest index wins ties


def test_wired_gateways_listed():
    plan = plan_network("cellular", grid_nodes(Region(6, 6), 1), 6, 1, 10, 1e9,
                        [Gateway(1, 1, wired=True)])
    assert plan.gateways[-1].wired
    assert plan.gateways[0].wired is False
