"""Data generation for the four seismic application scenarios.

A year is exactly 365 days; byte multiples are SI decimal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .crosslayer import SECONDS_PER_YEAR
from .errors import WrongStreamKindError


class StreamKind(str, Enum):
    CONTINUOUS = "continuous"
    INTERMITTENT = "intermittent"


class Operation(str, Enum):
    ON_DEMAND = "on-demand"
    CONTINUOUS = "continuous"
    BOTH = "both"


@dataclass(frozen=True)
class SensorSpec:
    components: int
    bits_per_sample: int
    sample_rate: float

    def __post_init__(self) -> None:
        if self.components not in (1, 2, 3):
            raise ValueError(f"components must be 1, 2 or 3, got {self.components}")
        if not 1 <= self.bits_per_sample <= 32:
            raise ValueError(f"bits_per_sample must lie in [1, 32], got {self.bits_per_sample}")
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be > 0, got {self.sample_rate}")


@dataclass(frozen=True)
class StreamModel:
    """A recording stream of one sensor.

    Continuous streams record for ``active_seconds`` per year (the whole
    year when ``None``). Intermittent streams record
    ``record_seconds_per_trigger`` after each of ``trigger_rate`` triggers per year.
    """

    kind: StreamKind
    sensor: SensorSpec
    trigger_rate: float = 0.0
    record_seconds_per_trigger: float = 0.0
    active_seconds: float | None = None
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", StreamKind(self.kind))
        if self.kind is StreamKind.INTERMITTENT:
            if not self.trigger_rate > 0 or not self.record_seconds_per_trigger > 0:
                raise ValueError("intermittent streams need trigger_rate > 0 "
                                 "and record_seconds_per_trigger > 0")
        elif self.active_seconds is not None and not 0 < self.active_seconds <= SECONDS_PER_YEAR:
            raise ValueError("active_seconds must lie in (0, one year]")


@dataclass(frozen=True)
class ScenarioProfile:
    name: str
    node_count: int
    streams: tuple[StreamModel, ...]
    operation: Operation = Operation.BOTH
    node_range: tuple[int, int] | None = None
    spacing_m: tuple[float, float] | None = None
    area_km2: tuple[float, float] | None = None
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise ValueError("node_count must be >= 1")


def stream_bitrate(s: StreamModel) -> float:
    """Instantaneous bit rate while the stream is recording."""
    return s.sensor.bits_per_sample * s.sensor.components * s.sensor.sample_rate


def yearly_volume(s: StreamModel) -> float:
    if s.kind is StreamKind.CONTINUOUS:
        seconds = SECONDS_PER_YEAR if s.active_seconds is None else s.active_seconds
        return seconds * stream_bitrate(s) / 8
    return s.trigger_rate * trigger_payload(s)


def trigger_payload(s: StreamModel) -> float:
    """Bytes recorded for one trigger; this is the design's ``trigger_payload``."""
    if s.kind is not StreamKind.INTERMITTENT:
        raise WrongStreamKindError("trigger payload is only defined for intermittent streams")
    return s.record_seconds_per_trigger * stream_bitrate(s) / 8


def network_yearly_volume(profile: ScenarioProfile) -> float:
    if not profile.streams:
        raise ValueError(f"profile {profile.name!r} has no streams")
    return profile.node_count * sum(yearly_volume(s) for s in profile.streams)


# Sensor presets: 4 bits of one component for interferometry, full 24-bit
# three-component traces for event recording.
def ansi_stream(sample_rate: float = 100) -> StreamModel:
    return StreamModel(StreamKind.CONTINUOUS, SensorSpec(1, 4, sample_rate), label="ANSI")


def gmm_stream(sample_rate: float = 150, triggers_per_year: float = 500,
               record_seconds: float = 120) -> StreamModel:
    return StreamModel(StreamKind.INTERMITTENT, SensorSpec(3, 24, sample_rate),
                       trigger_rate=triggers_per_year, record_seconds_per_trigger=record_seconds,
                       label="GMM")


MFM_CAMPAIGN_SECONDS = 4 * 3600
QCLS_REPORT_BYTES = 8
QCLS_SHOTS_PER_YEAR = 365_000


def builtin_profiles() -> list[ScenarioProfile]:
    """The four application scenarios, sized at the upper end of their node range."""
    return [
        ScenarioProfile(
            "GMM", 100, (gmm_stream(200),), Operation.ON_DEMAND,
            node_range=(10, 100), spacing_m=(1_000, 20_000), area_km2=(100, 1000),
        ),
        ScenarioProfile(
            "ANSI", 10_000, (ansi_stream(100),), Operation.CONTINUOUS,
            node_range=(1000, 10_000), spacing_m=(100, 1000), area_km2=(1, 100),
        ),
        ScenarioProfile(
            "MFM", 500,
            (StreamModel(StreamKind.CONTINUOUS, SensorSpec(3, 24, 200),
                         active_seconds=MFM_CAMPAIGN_SECONDS, label="MFM"),),
            Operation.BOTH,
            node_range=(100, 500), spacing_m=(50, 100), area_km2=(1, 1),
            notes=(f"full-trace recording for a {MFM_CAMPAIGN_SECONDS // 3600} h campaign",),
        ),
        ScenarioProfile(
            "QCLS", 500_000,
            # 2 components x 32 bit x 1 sps for 1 s = one 8-byte QC report per shot
            (StreamModel(StreamKind.INTERMITTENT, SensorSpec(2, 32, 1),
                         trigger_rate=QCLS_SHOTS_PER_YEAR, record_seconds_per_trigger=1,
                         label="QCLS"),),
            Operation.BOTH,
            node_range=(100_000, 500_000), spacing_m=(10, 200), area_km2=(100, 100),
            notes=(f"{QCLS_REPORT_BYTES}-byte QC report per shot, "
                   f"{QCLS_SHOTS_PER_YEAR} shots/year",),
        ),
    ]


def groningen_profile() -> ScenarioProfile:
    """1600 sensors on a 1 km grid carrying mid-rate ANSI and GMM streams."""
    return ScenarioProfile(
        "Groningen", 1600, (ansi_stream(100), gmm_stream(150)), Operation.BOTH,
        spacing_m=(1000, 1000), area_km2=(1600, 1600),
    )


def profile_by_name(name: str) -> ScenarioProfile:
    table = {p.name.lower(): p for p in [*builtin_profiles(), groningen_profile()]}
    try:
        return table[name.lower()]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(table)}") from None
