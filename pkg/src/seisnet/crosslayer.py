"""Bit-rate versus delivery-delay design mathematics and the design search.

All lengths are bytes, rates bit/s, times seconds. Byte multiples are SI
decimal (1 kB = 1000 B).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import InvalidRateError

SECONDS_PER_DAY = 86_400
SECONDS_PER_YEAR = 365 * SECONDS_PER_DAY

# Relative slack when taking ceilings of float products, so that a value
# like 3.0000000000000004 (exactly 3 in real arithmetic) does not become 4.
_CEIL_RTOL = 1e-9


def _ceil(x: float) -> int:
    return math.ceil(x - _CEIL_RTOL * max(1.0, abs(x)))


@dataclass(frozen=True)
class DesignParams:
    """One point of the cross-layer design space.

    ``trigger_payload`` is the full intermittent payload produced by one
    trigger; ``delay_budget`` is the tolerable time to deliver it.
    """

    efficiency: float  # eta_f
    frame_len: float  # L_f, bytes
    trigger_payload: float  # L_D2, bytes
    delay_budget: float  # t_D2, seconds
    duty_cycle: float  # delta_c
    split_ratio: float  # rho_d
    frame_error_rate: float  # lambda_f

    def __post_init__(self) -> None:
        problems = []
        if not 0 < self.efficiency <= 1:
            problems.append(f"efficiency must lie in (0, 1], got {self.efficiency}")
        if not self.frame_len > 0:
            problems.append(f"frame_len must be > 0, got {self.frame_len}")
        if not self.trigger_payload >= 1:
            problems.append(f"trigger_payload must be >= 1 byte, got {self.trigger_payload}")
        if not self.delay_budget > 0:
            problems.append(f"delay_budget must be > 0, got {self.delay_budget}")
        if not 0 < self.duty_cycle <= 1:
            problems.append(f"duty_cycle must lie in (0, 1], got {self.duty_cycle}")
        if not self.split_ratio > 0:
            problems.append(f"split_ratio must be > 0, got {self.split_ratio}")
        if not 0 <= self.frame_error_rate < 1:
            problems.append(f"frame_error_rate must lie in [0, 1), got {self.frame_error_rate}")
        if problems:
            raise ValueError("; ".join(problems))

    def with_(self, **changes) -> "DesignParams":
        return replace(self, **changes)


PARAM_NAMES: tuple[str, ...] = tuple(f.name for f in fields(DesignParams))


@dataclass(frozen=True)
class ParamRanges:
    """Candidate values per design parameter.

    ``levels`` maps a parameter name to its ``(low, mid, high)`` triple;
    ``grids`` optionally replaces the triple with an explicit list.
    """

    levels: Mapping[str, tuple[float, float, float]]
    grids: Mapping[str, tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        missing = [n for n in PARAM_NAMES if n not in self.levels and n not in self.grids]
        unknown = [n for n in (*self.levels, *self.grids) if n not in PARAM_NAMES]
        if missing or unknown:
            raise ValueError(f"ranges missing {missing} / unknown {unknown}")
        for name, (lo, mid, hi) in self.levels.items():
            if not lo <= mid <= hi:
                raise ValueError(f"{name}: need low <= mid <= high, got {(lo, mid, hi)}")
        for name, grid in self.grids.items():
            if not grid:
                raise ValueError(f"{name}: explicit grid is empty")
        # Validate every candidate value against the DesignParams invariants by
        # building the extreme corners; each axis is checked independently.
        base = {n: self.values(n)[0] for n in PARAM_NAMES}
        for name in PARAM_NAMES:
            for v in self.values(name):
                try:
                    DesignParams(**{**base, name: v})
                except ValueError as exc:
                    raise ValueError(f"{name}={v}: {exc}") from None

    @classmethod
    def single(cls, p: DesignParams) -> "ParamRanges":
        return cls(levels={n: (getattr(p, n),) * 3 for n in PARAM_NAMES})

    @classmethod
    def table3(cls) -> "ParamRanges":
        """The published low/mid/high design table."""
        return cls(levels={
            "efficiency": (0.9, 0.95, 0.98),
            "trigger_payload": (108_000, 162_000, 216_000),
            "frame_len": (64, 128, 256),
            "delay_budget": (3600, 36_000, SECONDS_PER_DAY),
            "duty_cycle": (0.01, 0.05, 0.1),
            "split_ratio": (1, 3, 5),
            "frame_error_rate": (0.01, 0.05, 0.1),
        })

    def values(self, name: str) -> tuple[float, ...]:
        if name in self.grids:
            return tuple(sorted(set(self.grids[name])))
        return tuple(sorted(set(self.levels[name])))

    def candidates(self) -> Iterable[DesignParams]:
        axes = [self.values(n) for n in PARAM_NAMES]
        for combo in itertools.product(*axes):
            yield DesignParams(**dict(zip(PARAM_NAMES, combo)))

    def __len__(self) -> int:
        return math.prod(len(self.values(n)) for n in PARAM_NAMES)


class Band(str, Enum):
    LICENSED = "licensed"
    UNLICENSED = "unlicensed"


@dataclass(frozen=True)
class TechnologyEntry:
    name: str
    max_bitrate: float
    max_duty_cycle: float
    band: Band = Band.UNLICENSED
    subscription_required: bool = False

    def __post_init__(self) -> None:
        if not self.max_bitrate > 0:
            raise ValueError(f"{self.name}: max_bitrate must be > 0")
        if not 0 < self.max_duty_cycle <= 1:
            raise ValueError(f"{self.name}: max_duty_cycle must lie in (0, 1]")


def default_catalog() -> list[TechnologyEntry]:
    """LoRa (all EU sub-bands combined) and NB-IoT."""
    return [
        TechnologyEntry("LoRa", 50_000, 0.121, Band.UNLICENSED, False),
        TechnologyEntry("NB-IoT", 200_000, 1.0, Band.LICENSED, True),
    ]


@dataclass(frozen=True)
class Criterion:
    name: str
    passed: bool
    reason: str
    warnings: tuple[str, ...] = ()


CRITERIA = ("delivery_before_next_trigger", "buffer_sustainability", "technology_match")


@dataclass(frozen=True)
class DesignOutcome:
    params: DesignParams
    required_bitrate: float
    frames_needed: int
    total_delay: float
    criteria: tuple[Criterion, Criterion, Criterion]
    technologies: tuple[TechnologyEntry, ...]

    @property
    def feasible(self) -> bool:
        return all(c.passed for c in self.criteria)

    def failures(self) -> list[str]:
        return [f"{c.name}: {c.reason}" for c in self.criteria if not c.passed]


def frames_per_trigger(p: DesignParams, with_loss: bool = True) -> int:
    """Full frames needed to carry one trigger payload through the d2 slots.

    With ``with_loss`` every damaged frame is assumed to need exactly one
    extra transmission.
    """
    x = p.trigger_payload * (p.split_ratio + 1) / (p.efficiency * p.frame_len)
    if with_loss:
        x *= 1 + p.frame_error_rate
    return max(1, _ceil(x))


def total_trigger_delay(p: DesignParams, bitrate: float) -> float:
    if not bitrate > 0:
        raise InvalidRateError(f"bit rate must be > 0, got {bitrate}")
    return frames_per_trigger(p, True) * 8 * p.frame_len / (bitrate * p.duty_cycle)


def required_bitrate(p: DesignParams) -> float:
    """Smallest on-air bit rate that delivers a trigger payload within the delay budget."""
    return 8 * p.frame_len / (p.duty_cycle * p.delay_budget) * frames_per_trigger(p, True)


def check_feasibility(
    p: DesignParams,
    bitrate: float,
    continuous_rate: float,
    trigger_rate: float,
    catalog: Sequence[TechnologyEntry],
) -> DesignOutcome:
    """Evaluate a design against the three feasibility criteria.

    ``trigger_rate`` is in triggers per second and ``continuous_rate`` in bit/s.
    Buffer sustainability is a hard check on the duty-cycled payload
    throughput; the d1-only throughput while a trigger is being drained is a
    warning, since the buffer only needs to ride out one trigger.
    """
    if not bitrate > 0:
        raise InvalidRateError(f"bit rate must be > 0, got {bitrate}")
    if not continuous_rate > 0 or not trigger_rate > 0:
        raise InvalidRateError("continuous_rate and trigger_rate must be > 0")

    delay = total_trigger_delay(p, bitrate)
    gap = 1 / trigger_rate
    c1 = Criterion(
        CRITERIA[0], delay <= gap,
        f"delivery {delay:.1f} s {'<=' if delay <= gap else '>'} mean trigger gap {gap:.1f} s",
    )

    throughput = p.duty_cycle * bitrate * p.efficiency
    d1_throughput = throughput * p.split_ratio / (1 + p.split_ratio)
    warn = ()
    if d1_throughput < continuous_rate:
        warn = (f"d1 throughput during trigger drain {d1_throughput:.2f} bps "
                f"< continuous {continuous_rate:.2f} bps; buffer grows while triggers are pending",)
    c2 = Criterion(
        CRITERIA[1], throughput >= continuous_rate,
        f"duty-cycled payload throughput {throughput:.2f} bps "
        f"{'>=' if throughput >= continuous_rate else '<'} continuous {continuous_rate:.2f} bps",
        warn,
    )

    matched = tuple(t for t in catalog
                    if t.max_bitrate >= bitrate and t.max_duty_cycle >= p.duty_cycle)
    if not catalog:
        reason = "technology catalog is empty"
    elif matched:
        reason = "matched " + ", ".join(t.name for t in matched)
    else:
        reason = "no technology offers " + f"{bitrate:.0f} bps at duty cycle {p.duty_cycle}"
    c3 = Criterion(CRITERIA[2], bool(matched), reason)

    return DesignOutcome(
        params=p,
        required_bitrate=bitrate,
        frames_needed=frames_per_trigger(p, True),
        total_delay=delay,
        criteria=(c1, c2, c3),
        technologies=matched,
    )


class Objective(str, Enum):
    MIN_BITRATE = "min_bitrate"
    MIN_DELAY = "min_delay"


@dataclass
class SearchResult:
    feasible: list[DesignOutcome]
    pareto: list[DesignOutcome]
    rejected: list[DesignOutcome]

    @property
    def best(self) -> DesignOutcome | None:
        return self.feasible[0] if self.feasible else None


def _sort_key(outcome: DesignOutcome, objective: Objective) -> tuple:
    p = outcome.params
    primary = (outcome.required_bitrate if objective is Objective.MIN_BITRATE
               else outcome.total_delay)
    # Remaining fields make the order total, so equal-objective ties never
    # depend on grid enumeration order.
    return (primary, p.duty_cycle, p.split_ratio,
            *(getattr(p, n) for n in PARAM_NAMES))


def pareto_front(outcomes: Iterable[DesignOutcome]) -> list[DesignOutcome]:
    """Outcomes not dominated in (required bit rate, delay budget), both minimised."""
    ordered = sorted(outcomes, key=lambda o: (o.required_bitrate, o.params.delay_budget,
                                              *(getattr(o.params, n) for n in PARAM_NAMES)))
    front: list[DesignOutcome] = []
    best_delay = math.inf
    for o in ordered:
        if o.params.delay_budget < best_delay:
            front.append(o)
            best_delay = o.params.delay_budget
    return front


def design_search(
    ranges: ParamRanges,
    objective: Objective | str,
    continuous_rate: float,
    trigger_rate: float,
    catalog: Sequence[TechnologyEntry],
) -> SearchResult:
    """Exhaustively evaluate the candidate grid and rank the feasible designs."""
    objective = Objective(objective)
    feasible, rejected = [], []
    for p in ranges.candidates():
        outcome = check_feasibility(p, required_bitrate(p), continuous_rate, trigger_rate, catalog)
        (feasible if outcome.feasible else rejected).append(outcome)
    feasible.sort(key=lambda o: _sort_key(o, objective))
    rejected.sort(key=lambda o: _sort_key(o, objective))
    return SearchResult(feasible=feasible, pareto=pareto_front(feasible), rejected=rejected)


def daily_deliverable_volume(bitrate: float, duty_cycle: float, efficiency: float = 1.0) -> float:
    """Bytes per day one node can push at ``bitrate`` under ``duty_cycle``."""
    if not bitrate > 0:
        raise InvalidRateError(f"bit rate must be > 0, got {bitrate}")
    return bitrate * duty_cycle * efficiency * SECONDS_PER_DAY / 8


def network_yearly_capacity(daily_per_node: float, node_count: int, days: int = 365) -> float:
    return daily_per_node * days * node_count
