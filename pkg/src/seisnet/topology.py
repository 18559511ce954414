"""Node and gateway layout planning for cellular and hybrid architectures.

Coverage is a plain range threshold; there is no propagation model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np


class Architecture(str, Enum):
    CELLULAR = "cellular"  # nodes talk straight to towers / masts
    HYBRID = "hybrid"  # nodes cluster around private concentrators


ARCHITECTURE_NOTES = {
    Architecture.CELLULAR: (
        "gateways are existing towers or Node-B masts; backhaul via operator network",
    ),
    Architecture.HYBRID: (
        "gateways are cluster-head concentrators; uplink option: recording truck",
        "gateways are cluster-head concentrators; uplink option: satellite",
        "gateways are cluster-head concentrators; uplink option: nearest 3G/4G tower",
    ),
}


@dataclass(frozen=True)
class Region:
    width: float  # km
    height: float  # km

    def __post_init__(self) -> None:
        if not (self.width > 0 and self.height > 0):
            raise ValueError("region dimensions must be > 0")


@dataclass(frozen=True)
class NodeLayout:
    region: Region
    positions: tuple[tuple[float, float], ...]
    spacing: float | None = None
    source: str = "grid"

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class Gateway:
    x: float
    y: float
    wired: bool = False  # wired backhaul site, e.g. a borehole station with HDSL


@dataclass
class NetworkPlan:
    architecture: Architecture
    nodes: NodeLayout
    gateways: list[Gateway]
    assignment: list[int | None]  # node index -> gateway index, None if uncovered
    link_distance: list[float]  # km, to the nearest gateway
    per_gateway_load: list[float]  # bit/s
    per_node_uplink: float
    max_link_distance: float
    gateway_capacity: float
    estimate_gateway_count: int
    notes: list[str] = field(default_factory=list)

    @property
    def uncovered(self) -> list[int]:
        return [i for i, g in enumerate(self.assignment) if g is None]

    @property
    def overloaded(self) -> list[int]:
        return [j for j, load in enumerate(self.per_gateway_load) if load > self.gateway_capacity]

    @property
    def mean_load(self) -> float:
        return sum(self.per_gateway_load) / len(self.gateways)

    @property
    def estimate_mean_load(self) -> float:
        """Mean load if the covered nodes were spread over the formula gateway count."""
        return sum(self.per_gateway_load) / self.estimate_gateway_count


def _grid_axis(extent: float, spacing: float) -> list[float]:
    n = _ceil_div(extent, spacing)
    # the last cell may be partial; keep its node inside the region
    return [min((i + 0.5) * spacing, extent) for i in range(n)]


def _ceil_div(a: float, b: float) -> int:
    x = a / b
    return math.ceil(x - 1e-9 * max(1.0, x))


def grid_nodes(region: Region, spacing: float) -> NodeLayout:
    """Regular row-major grid with the first node at ``(spacing/2, spacing/2)``."""
    if not 0 < spacing <= min(region.width, region.height):
        raise ValueError(f"spacing {spacing} km must lie in (0, {min(region.width, region.height)}]")
    xs, ys = _grid_axis(region.width, spacing), _grid_axis(region.height, spacing)
    return NodeLayout(region, tuple((x, y) for y in ys for x in xs), spacing, "grid")


def explicit_nodes(region: Region, positions: Sequence[tuple[float, float]]) -> NodeLayout:
    for x, y in positions:
        if not (0 <= x <= region.width and 0 <= y <= region.height):
            raise ValueError(f"node ({x}, {y}) lies outside the region")
    return NodeLayout(region, tuple((float(x), float(y)) for x, y in positions), None, "explicit")


def gateway_count(region: Region, gateway_spacing: float) -> int:
    """Rough gateway count: ceiling of the area ratio, not of each side."""
    if not gateway_spacing > 0:
        raise ValueError("gateway spacing must be > 0")
    return _ceil_div(region.width * region.height, gateway_spacing ** 2)


def gateway_grid(region: Region, gateway_spacing: float) -> list[Gateway]:
    if not gateway_spacing > 0:
        raise ValueError("gateway spacing must be > 0")
    # A spacing larger than the region collapses that axis to its midpoint.
    xs = (_grid_axis(region.width, gateway_spacing) if gateway_spacing <= region.width
          else [region.width / 2])
    ys = (_grid_axis(region.height, gateway_spacing) if gateway_spacing <= region.height
          else [region.height / 2])
    return [Gateway(x, y) for y in ys for x in xs]


def plan_network(
    arch: Architecture | str,
    nodes: NodeLayout,
    gateway_spacing: float,
    per_node_uplink: float,
    max_link_distance: float,
    gateway_capacity: float,
    extra_gateways: Sequence[Gateway] = (),
) -> NetworkPlan:
    """Place gateways on a grid and attach each node to its nearest gateway.

    Ties go to the lower gateway index. Nodes farther than
    ``max_link_distance`` from every gateway stay unassigned. Gateways whose
    summed uplink exceeds ``gateway_capacity`` are reported, not rejected.
    """
    arch = Architecture(arch)
    if not (per_node_uplink > 0 and max_link_distance > 0):
        raise ValueError("per_node_uplink and max_link_distance must be > 0")
    if gateway_capacity < 0:
        raise ValueError("gateway_capacity must be >= 0")

    gateways = gateway_grid(nodes.region, gateway_spacing) + list(extra_gateways)
    pos = np.asarray(nodes.positions, dtype=float).reshape(-1, 2)
    gws = np.asarray([(g.x, g.y) for g in gateways], dtype=float)
    dist = np.hypot(pos[:, None, 0] - gws[None, :, 0], pos[:, None, 1] - gws[None, :, 1])
    nearest = np.argmin(dist, axis=1)  # first minimum wins ties
    nearest_d = dist[np.arange(len(pos)), nearest]

    assignment: list[int | None] = []
    load = [0.0] * len(gateways)
    for j, d in zip(nearest.tolist(), nearest_d.tolist()):
        if d <= max_link_distance:
            assignment.append(j)
            load[j] += per_node_uplink
        else:
            assignment.append(None)

    estimate_count = gateway_count(nodes.region, gateway_spacing)
    notes = list(ARCHITECTURE_NOTES[arch])
    grid_count = len(gateways) - len(extra_gateways)
    if grid_count != estimate_count:
        notes.append(
            f"area-ratio estimate gives {estimate_count} gateways; a full grid at "
            f"{gateway_spacing} km spacing needs {grid_count}"
        )
    return NetworkPlan(
        architecture=arch,
        nodes=nodes,
        gateways=gateways,
        assignment=assignment,
        link_distance=nearest_d.tolist(),
        per_gateway_load=load,
        per_node_uplink=per_node_uplink,
        max_link_distance=max_link_distance,
        gateway_capacity=gateway_capacity,
        estimate_gateway_count=estimate_count,
        notes=notes,
    )
