"""Project configuration: a single JSON document validated with pydantic."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import cost as cost_mod
from .crosslayer import (PARAM_NAMES, SECONDS_PER_YEAR, Band, DesignParams, ParamRanges,
                         TechnologyEntry, default_catalog)
from .scenarios import (ScenarioProfile, SensorSpec, StreamKind, StreamModel,
                        profile_by_name)
from .simulator import RetransmissionMode
from .topology import Architecture, Gateway


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class StreamConfig(_Model):
    kind: StreamKind
    components: int = Field(ge=1, le=3)
    bits_per_sample: int = Field(ge=1, le=32)
    sample_rate: float = Field(gt=0)
    trigger_rate: float = Field(0.0, ge=0, description="triggers per year")
    record_seconds_per_trigger: float = Field(0.0, ge=0)
    active_seconds: Optional[float] = Field(None, gt=0, le=SECONDS_PER_YEAR)
    label: str = ""

    @model_validator(mode="after")
    def _intermittent_fields(self):
        if self.kind is StreamKind.INTERMITTENT and not (
                self.trigger_rate > 0 and self.record_seconds_per_trigger > 0):
            raise ValueError("intermittent streams need trigger_rate > 0 and "
                             "record_seconds_per_trigger > 0")
        return self

    def build(self) -> StreamModel:
        return StreamModel(self.kind, SensorSpec(self.components, self.bits_per_sample,
                                                 self.sample_rate),
                           self.trigger_rate, self.record_seconds_per_trigger,
                           self.active_seconds, self.label)


class ScenarioConfig(_Model):
    name: str = "Groningen"
    node_count: Optional[int] = Field(None, ge=1)
    streams: Optional[list[StreamConfig]] = None

    @field_validator("name")
    @classmethod
    def _known(cls, v: str) -> str:
        profile_by_name(v)
        return v

    @field_validator("streams")
    @classmethod
    def _non_empty(cls, v):
        if v is not None and not v:
            raise ValueError("a scenario needs at least one stream")
        return v

    def build(self) -> ScenarioProfile:
        base = profile_by_name(self.name)
        streams = tuple(s.build() for s in self.streams) if self.streams is not None else base.streams
        return ScenarioProfile(base.name, self.node_count or base.node_count, streams,
                               base.operation, base.node_range, base.spacing_m, base.area_km2,
                               base.notes)


class DesignPoint(_Model):
    efficiency: float = Field(gt=0, le=1)
    frame_len: float = Field(gt=0)
    trigger_payload: float = Field(ge=1)
    delay_budget: float = Field(gt=0)
    duty_cycle: float = Field(gt=0, le=1)
    split_ratio: float = Field(gt=0)
    frame_error_rate: float = Field(ge=0, lt=1)

    def build(self) -> DesignParams:
        return DesignParams(**self.model_dump())


class DesignConfig(_Model):
    ranges: Optional[dict[str, list[float]]] = Field(
        None, description="explicit candidate grid per parameter; omitted = reference point only")
    reference: Optional[DesignPoint] = None
    objective: Literal["min_bitrate", "min_delay"] = "min_bitrate"
    continuous_rate: Optional[float] = Field(None, gt=0, description="bit/s; default from scenario")
    trigger_rate: Optional[float] = Field(None, gt=0, description="per year; default from scenario")

    @field_validator("ranges")
    @classmethod
    def _ranges(cls, v):
        if v is None:
            return v
        unknown = sorted(set(v) - set(PARAM_NAMES))
        if unknown:
            raise ValueError(f"unknown design parameters {unknown}")
        for name, grid in v.items():
            if not grid:
                raise ValueError(f"{name}: empty grid")
        return v

    @model_validator(mode="after")
    def _something_to_search(self):
        if self.reference is None and (self.ranges is None or set(self.ranges) != set(PARAM_NAMES)):
            raise ValueError("give a reference design or a grid for every parameter")
        if self.ranges is not None:
            self.build_ranges()  # surfaces invariant violations at load time
        return self

    def build_ranges(self) -> ParamRanges:
        ref = self.reference.build() if self.reference else None
        grids = {}
        for name in PARAM_NAMES:
            if self.ranges and name in self.ranges:
                grids[name] = tuple(self.ranges[name])
            else:
                grids[name] = (getattr(ref, name),)
        return ParamRanges(levels={}, grids=grids)


class TechnologyConfig(_Model):
    name: str
    max_bitrate: float = Field(gt=0)
    max_duty_cycle: float = Field(gt=0, le=1)
    band: Band = Band.UNLICENSED
    subscription_required: bool = False

    def build(self) -> TechnologyEntry:
        return TechnologyEntry(**self.model_dump())


class GatewayConfig(_Model):
    x: float
    y: float
    wired: bool = True


class TopologyConfig(_Model):
    width: float = Field(gt=0, description="km")
    height: float = Field(gt=0, description="km")
    node_spacing: float = Field(gt=0, description="km")
    gateway_spacing: float = Field(gt=0, description="km")
    architecture: Architecture = Architecture.HYBRID
    per_node_uplink: Optional[float] = Field(None, gt=0, description="bit/s; default reference R_b")
    max_link_distance: float = Field(gt=0, description="km")
    gateway_capacity: float = Field(ge=0, description="bit/s")
    extra_gateways: list[GatewayConfig] = []

    @model_validator(mode="after")
    def _spacing_fits(self):
        if self.node_spacing > min(self.width, self.height):
            raise ValueError("node_spacing exceeds the region")
        return self

    def gateways(self) -> list[Gateway]:
        return [Gateway(g.x, g.y, g.wired) for g in self.extra_gateways]


class CostConfig(_Model):
    """Prices in whole currency units; ``gateway_count`` None means the topology estimate."""

    name: str
    node_count: Optional[int] = Field(None, ge=0)
    node_unit_price: float = Field(0, ge=0)
    gateway_count: Optional[int] = Field(0, ge=0)
    gateway_unit_price: float = Field(0, ge=0)
    extra_mast_count: int = Field(0, ge=0)
    mast_unit_price: float = Field(0, ge=0)
    subscription_per_node_year: float = Field(0, ge=0)
    years: int = Field(1, ge=1)

    def build(self, node_count: int, gateway_estimate: int) -> cost_mod.CostModel:
        cents = lambda v: int(round(v * 100))  # noqa: E731
        return cost_mod.CostModel(
            node_count=self.node_count if self.node_count is not None else node_count,
            node_unit_price=cents(self.node_unit_price),
            gateway_count=self.gateway_count if self.gateway_count is not None else gateway_estimate,
            gateway_unit_price=cents(self.gateway_unit_price),
            extra_mast_count=self.extra_mast_count,
            mast_unit_price=cents(self.mast_unit_price),
            subscription_per_node_year=cents(self.subscription_per_node_year),
            years=self.years,
            name=self.name,
        )


class SimulationConfig(_Model):
    node_count: int = Field(16, ge=1)
    duration: float = Field(86_400, ge=0, description="seconds")
    bitrate: Optional[float] = Field(None, gt=0, description="bit/s; default reference R_b")
    continuous_rate: Optional[float] = Field(None, ge=0, description="bit/s; default from scenario")
    trigger_rate: float = Field(0.0, ge=0, description="Poisson triggers per year")
    trigger_times: list[float] = [0.0]
    frame_error_rate: Optional[float] = Field(None, ge=0, lt=1)
    retransmission_mode: RetransmissionMode = RetransmissionMode.SINGLE_RETRY
    seed: int = Field(0, ge=0, lt=2 ** 64)
    workers: int = Field(1, ge=1)

    @field_validator("trigger_times")
    @classmethod
    def _non_negative(cls, v):
        if any(t < 0 for t in v):
            raise ValueError("trigger times must be >= 0")
        return v


class ProjectConfig(_Model):
    scenario: ScenarioConfig = ScenarioConfig()
    design: DesignConfig
    catalog: list[TechnologyConfig] = Field(
        default_factory=lambda: [TechnologyConfig(**vars(t)) for t in default_catalog()])
    topology: Optional[TopologyConfig] = None
    costs: list[CostConfig] = []
    simulation: SimulationConfig = SimulationConfig()
    format: Literal["json", "text"] = "text"

    @model_validator(mode="after")
    def _cross_checks(self):
        profile = self.scenario.build()
        if self.simulation.bitrate is None and self.design.reference is None:
            raise ValueError("simulation.bitrate is required without a design.reference")
        if self.design.continuous_rate is None and not continuous_rate(profile):
            raise ValueError("design.continuous_rate is required: scenario has no continuous stream")
        if self.design.trigger_rate is None and not trigger_rate(profile):
            raise ValueError("design.trigger_rate is required: scenario has no intermittent stream")
        return self

    # derived inputs -----------------------------------------------------

    def profile(self) -> ScenarioProfile:
        return self.scenario.build()

    def catalog_entries(self) -> list[TechnologyEntry]:
        return [t.build() for t in self.catalog]

    def continuous_rate(self) -> float:
        return self.design.continuous_rate or continuous_rate(self.profile())

    def trigger_rate_per_second(self) -> float:
        per_year = self.design.trigger_rate or trigger_rate(self.profile())
        return per_year / SECONDS_PER_YEAR

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2)

    def digest(self) -> str:
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def continuous_rate(profile: ScenarioProfile) -> float:
    from .scenarios import stream_bitrate

    return sum(stream_bitrate(s) for s in profile.streams if s.kind is StreamKind.CONTINUOUS)


def trigger_rate(profile: ScenarioProfile) -> float:
    """Highest per-sensor trigger rate among intermittent streams, per year."""
    rates = [s.trigger_rate for s in profile.streams if s.kind is StreamKind.INTERMITTENT]
    return max(rates, default=0.0)


def load_config(path: str | Path) -> ProjectConfig:
    return ProjectConfig.model_validate_json(Path(path).read_text())


GRONINGEN_REFERENCE = DesignPoint(
    efficiency=0.9, frame_len=128, trigger_payload=216_000, delay_budget=10 * 3600,
    duty_cycle=0.01, split_ratio=1, frame_error_rate=0.01,
)


def groningen(delay_budget: float = 10 * 3600) -> ProjectConfig:
    """The Groningen field study: 1600 sensors on a 40 x 40 km grid."""
    table = ParamRanges.table3()
    reference = GRONINGEN_REFERENCE.model_copy(update={"delay_budget": delay_budget})
    return ProjectConfig(
        scenario=ScenarioConfig(name="Groningen"),
        design=DesignConfig(
            ranges={n: list(table.values(n)) for n in PARAM_NAMES},
            reference=reference,
            objective="min_bitrate",
        ),
        topology=TopologyConfig(
            width=40, height=40, node_spacing=1, gateway_spacing=6,
            architecture=Architecture.HYBRID, max_link_distance=6,
            # no published figure; a nominal concentrator budget
            gateway_capacity=1_000_000,
        ),
        costs=[
            CostConfig(name="LoRa", node_unit_price=10, gateway_count=None,
                       gateway_unit_price=1000),
            CostConfig(name="NB-IoT", node_unit_price=5, extra_mast_count=5,
                       mast_unit_price=20_000, subscription_per_node_year=30),
        ],
        simulation=SimulationConfig(node_count=16, duration=86_400, trigger_times=[0.0],
                                    retransmission_mode=RetransmissionMode.SINGLE_RETRY),
    )


PRESETS = {
    "groningen": groningen,
    "groningen-1h": lambda: groningen(delay_budget=3600),
}


def preset(name: str) -> ProjectConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
