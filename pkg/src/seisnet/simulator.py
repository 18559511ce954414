"""Slotted simulation of the duty-cycled dual-stream transmission protocol.

Each node gets one transmission opportunity per duty-cycle period
``t_o = t_f / duty_cycle``. While intermittent (trigger) data is queued, a
frame carries continuous bytes in ``d1`` and trigger bytes in ``d2``;
otherwise both parts carry continuous bytes. Nodes do not contend for the
channel, so they are simulated independently and merged in node order.
"""

from __future__ import annotations

import logging
import math
import random
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .crosslayer import DesignParams, frames_per_trigger, total_trigger_delay
from .errors import InvalidFrameError, ParameterMismatchError
from .frames import DutyCycle, FrameSpec, frame_airtime, split_payload

log = logging.getLogger(__name__)


class RetransmissionMode(str, Enum):
    # A damaged frame is resent once and the resend is taken as delivered;
    # a damage draw on the resend only counts as an assumption violation.
    SINGLE_RETRY = "single_retry"
    # Resend until the frame gets through.
    PERSISTENT = "persistent"


@dataclass(frozen=True)
class SimConfig:
    frame: FrameSpec
    bitrate: float
    duty_cycle: float
    continuous_rate: float = 0.0  # bit/s
    trigger_rate: float = 0.0  # triggers per second, Poisson
    trigger_payload: int = 0  # bytes per trigger
    frame_error_rate: float = 0.0
    retransmission_mode: RetransmissionMode = RetransmissionMode.PERSISTENT
    duration: float = 86_400.0
    node_count: int = 1
    rng_seed: int = 0
    trigger_times: tuple[float, ...] = ()  # injected on every node, on top of Poisson arrivals
    trace: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "retransmission_mode", RetransmissionMode(self.retransmission_mode))
        object.__setattr__(self, "trigger_times", tuple(sorted(self.trigger_times)))
        if self.frame.payload_len <= 0:
            raise InvalidFrameError("frame payload is empty; nothing can be transmitted")
        if not self.bitrate > 0:
            raise ValueError("bitrate must be > 0")
        if not 0 < self.duty_cycle <= 1:
            raise ValueError("duty_cycle must lie in (0, 1]")
        if self.continuous_rate < 0 or self.trigger_rate < 0:
            raise ValueError("rates must be >= 0")
        if not 0 <= self.frame_error_rate < 1:
            raise ValueError("frame_error_rate must lie in [0, 1)")
        if self.duration < 0:
            raise ValueError("duration must be >= 0")
        if self.node_count < 1:
            raise ValueError("node_count must be >= 1")
        if not 0 <= self.rng_seed < 2 ** 64:
            raise ValueError("rng_seed must be an unsigned 64-bit integer")
        has_triggers = self.trigger_rate > 0 or bool(self.trigger_times)
        if has_triggers:
            if self.trigger_payload < 1:
                raise ValueError("trigger_payload must be >= 1 byte when triggers occur")
            if self.frame.d2_len < 1:
                raise InvalidFrameError("frame has no d2 room for trigger data")
        if any(t < 0 for t in self.trigger_times):
            raise ValueError("trigger_times must be >= 0")
        if self.trigger_rate > 0 and not self.trigger_times and self.trigger_rate * self.duration < 1:
            log.warning("duration %.0f s covers fewer than one expected trigger", self.duration)

    @classmethod
    def from_design(cls, p: DesignParams, bitrate: float, **kwargs) -> "SimConfig":
        """Integer frame layout and protocol settings matching a design point."""
        frame = split_payload(int(round(p.frame_len)), p.efficiency, p.split_ratio)
        return cls(frame=frame, bitrate=bitrate, duty_cycle=p.duty_cycle,
                   trigger_payload=int(math.ceil(p.trigger_payload)),
                   frame_error_rate=p.frame_error_rate, **kwargs)

    @property
    def frame_time(self) -> float:
        return frame_airtime(self.frame.total_len, self.bitrate)

    @property
    def duty(self) -> DutyCycle:
        return DutyCycle.from_frame_time(self.frame_time, self.duty_cycle)

    @property
    def period(self) -> float:
        return self.frame_time / self.duty_cycle


@dataclass
class TriggerRecord:
    trigger_id: int
    node: int
    arrival: float
    completed: float | None = None  # end of the frame carrying the last byte
    completed_slot_end: float | None = None  # end of that frame's duty-cycle period

    @property
    def delay(self) -> float | None:
        """Arrival to the end of the duty-cycle period that delivered the last byte."""
        return None if self.completed_slot_end is None else self.completed_slot_end - self.arrival

    @property
    def delay_last_byte(self) -> float | None:
        return None if self.completed is None else self.completed - self.arrival


@dataclass
class StreamLedger:
    generated: int = 0
    delivered: int = 0
    queued: int = 0
    in_flight: int = 0

    def balanced(self) -> bool:
        return self.generated == self.delivered + self.queued + self.in_flight

    def merge(self, other: "StreamLedger") -> "StreamLedger":
        return StreamLedger(self.generated + other.generated, self.delivered + other.delivered,
                            self.queued + other.queued, self.in_flight + other.in_flight)


@dataclass
class NodeState:
    continuous_buffer: int = 0
    intermittent_queue: deque = field(default_factory=deque)  # [trigger_id, remaining]
    frames_sent: int = 0
    frames_damaged: int = 0
    frames_retransmitted: int = 0
    retry_violations: int = 0


@dataclass
class NodeResult:
    node: int
    triggers: list[TriggerRecord]
    continuous: StreamLedger
    intermittent: StreamLedger
    frames_sent: int
    frames_damaged: int
    frames_retransmitted: int
    retry_violations: int
    buffer_max: int
    buffer_mean: float
    buffer_unstable: bool
    trace: list[tuple]


TRACE_COLUMNS = ("time", "node", "frame_no", "flag", "d1_bytes", "d2_bytes", "damaged", "retry")


@dataclass
class SimReport:
    config: SimConfig
    period: float
    frame_time: float
    slots: int
    triggers: list[TriggerRecord]
    continuous: StreamLedger
    intermittent: StreamLedger
    frames_sent: int
    frames_damaged: int
    frames_retransmitted: int
    retry_violations: int
    buffer_max: int
    buffer_mean: float
    buffer_unstable: bool
    node_throughput: list[float]  # delivered bit/s, both streams
    trace: list[tuple]

    @property
    def delay_samples(self) -> list[float]:
        return [t.delay for t in self.triggers if t.delay is not None]

    @property
    def delay_samples_last_byte(self) -> list[float]:
        return [t.delay_last_byte for t in self.triggers if t.delay_last_byte is not None]

    @property
    def fer(self) -> float:
        return self.frames_damaged / self.frames_sent if self.frames_sent else 0.0

    @property
    def aggregate_throughput(self) -> float:
        return sum(self.node_throughput)

    @property
    def triggers_generated(self) -> int:
        return len(self.triggers)

    @property
    def triggers_delivered(self) -> int:
        return sum(t.completed is not None for t in self.triggers)


def _node_rngs(seed: int, node: int) -> tuple[random.Random, random.Random]:
    arrivals, losses = np.random.SeedSequence([seed, node]).spawn(2)
    return (random.Random(int(arrivals.generate_state(2, np.uint64)[0])),
            random.Random(int(losses.generate_state(2, np.uint64)[0])))


def _arrivals(cfg: SimConfig, rng: random.Random) -> list[float]:
    times = [t for t in cfg.trigger_times if t < cfg.duration]
    if cfg.trigger_rate > 0:
        t = rng.expovariate(cfg.trigger_rate)
        while t < cfg.duration:
            times.append(t)
            t += rng.expovariate(cfg.trigger_rate)
    return sorted(times)


def _simulate_node(cfg: SimConfig, node: int) -> NodeResult:
    arrival_rng, loss_rng = _node_rngs(cfg.rng_seed, node)
    t_f, t_o = cfg.frame_time, cfg.period
    d1_cap, d2_cap = cfg.frame.d1_len, cfg.frame.d2_len
    payload_cap = cfg.frame.payload_len
    slots = math.ceil(cfg.duration / t_o) if cfg.duration > 0 else 0

    arrivals = _arrivals(cfg, arrival_rng)
    triggers = [TriggerRecord(i, node, a) for i, a in enumerate(arrivals)]
    outstanding = [cfg.trigger_payload] * len(triggers)

    st = NodeState()
    cont = StreamLedger()
    inter = StreamLedger()
    pending = None  # (cont_bytes, [(trigger_id, bytes)], flag, retries)
    next_arrival = 0
    buf_sum = 0
    buf_max = 0
    buf_mid = 0
    trace: list[tuple] = []

    for k in range(slots):
        now = k * t_o
        produced = math.floor(cfg.continuous_rate * now / 8)
        st.continuous_buffer += produced - cont.generated
        cont.generated = produced
        while next_arrival < len(triggers) and triggers[next_arrival].arrival <= now:
            st.intermittent_queue.append([next_arrival, cfg.trigger_payload])
            inter.generated += cfg.trigger_payload
            next_arrival += 1
        if (cfg.continuous_rate == 0 and pending is None and not st.intermittent_queue
                and next_arrival == len(triggers)):
            break  # idle for the rest of the run

        buf_max = max(buf_max, st.continuous_buffer)
        buf_sum += st.continuous_buffer
        if k == slots // 2:
            buf_mid = st.continuous_buffer

        if pending is not None:
            c_bytes, parts, flag, retries = pending
            retries += 1
            st.frames_retransmitted += 1
        else:
            parts = []
            if st.intermittent_queue:
                flag = 1
                room = d2_cap
                while room and st.intermittent_queue:
                    entry = st.intermittent_queue[0]
                    take = min(room, entry[1])
                    parts.append((entry[0], take))
                    entry[1] -= take
                    room -= take
                    if entry[1] == 0:
                        st.intermittent_queue.popleft()
                # an unfilled d2 tail is padded with continuous bytes
                c_bytes = min(d1_cap + room, st.continuous_buffer)
            else:
                flag = 0
                c_bytes = min(payload_cap, st.continuous_buffer)
            retries = 0
            st.continuous_buffer -= c_bytes
            d2_bytes = sum(b for _, b in parts)
            if c_bytes == 0 and d2_bytes == 0:
                continue  # nothing to send this period
            cont.in_flight += c_bytes
            inter.in_flight += d2_bytes

        d2_bytes = sum(b for _, b in parts)
        st.frames_sent += 1
        hit = loss_rng.random() < cfg.frame_error_rate
        damaged = hit
        if hit and retries >= 1 and cfg.retransmission_mode is RetransmissionMode.SINGLE_RETRY:
            st.retry_violations += 1
            damaged = False
        if cfg.trace:
            trace.append((now, node, st.frames_sent - 1, flag,
                          min(c_bytes, d1_cap) if flag else c_bytes,
                          d2_bytes + (c_bytes - d1_cap if flag and c_bytes > d1_cap else 0),
                          int(damaged), retries))

        if damaged:
            st.frames_damaged += 1
            pending = (c_bytes, parts, flag, retries)
            continue

        pending = None
        cont.in_flight -= c_bytes
        cont.delivered += c_bytes
        inter.in_flight -= d2_bytes
        inter.delivered += d2_bytes
        for tid, b in parts:
            outstanding[tid] -= b
            if outstanding[tid] == 0:
                triggers[tid].completed = now + t_f
                triggers[tid].completed_slot_end = now + t_o

    # Bytes still waiting at the end of the run.
    produced = math.floor(cfg.continuous_rate * cfg.duration / 8) if slots else 0
    st.continuous_buffer += max(0, produced - cont.generated)
    cont.generated = max(cont.generated, produced)
    cont.queued = st.continuous_buffer
    inter.queued = sum(e[1] for e in st.intermittent_queue)
    for _ in triggers[next_arrival:]:
        # arrived after the last opportunity but before the end of the run
        inter.generated += cfg.trigger_payload
        inter.queued += cfg.trigger_payload

    # Growing backlog: more than a few frames behind and still rising in the second half.
    unstable = (cont.queued > 2 * payload_cap and cont.queued > buf_mid + payload_cap)
    return NodeResult(
        node=node, triggers=triggers, continuous=cont, intermittent=inter,
        frames_sent=st.frames_sent, frames_damaged=st.frames_damaged,
        frames_retransmitted=st.frames_retransmitted, retry_violations=st.retry_violations,
        buffer_max=buf_max, buffer_mean=buf_sum / slots if slots else 0.0,
        buffer_unstable=unstable, trace=trace,
    )


def run(config: SimConfig, workers: int = 1) -> SimReport:
    """Simulate every node and merge the results in node order."""
    nodes = range(config.node_count)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda n: _simulate_node(config, n), nodes))
    else:
        results = [_simulate_node(config, n) for n in nodes]

    cont, inter = StreamLedger(), StreamLedger()
    for r in results:
        cont = cont.merge(r.continuous)
        inter = inter.merge(r.intermittent)
    duration = config.duration
    throughput = [
        8 * (r.continuous.delivered + r.intermittent.delivered) / duration if duration > 0 else 0.0
        for r in results
    ]
    slots = math.ceil(duration / config.period) if duration > 0 else 0
    return SimReport(
        config=config,
        period=config.period,
        frame_time=config.frame_time,
        slots=slots,
        triggers=[t for r in results for t in r.triggers],
        continuous=cont,
        intermittent=inter,
        frames_sent=sum(r.frames_sent for r in results),
        frames_damaged=sum(r.frames_damaged for r in results),
        frames_retransmitted=sum(r.frames_retransmitted for r in results),
        retry_violations=sum(r.retry_violations for r in results),
        buffer_max=max(r.buffer_max for r in results),
        buffer_mean=sum(r.buffer_mean for r in results) / len(results),
        buffer_unstable=any(r.buffer_unstable for r in results),
        node_throughput=throughput,
        trace=[row for r in results for row in r.trace],
    )


@dataclass(frozen=True)
class Comparison:
    predicted_delay: float
    samples: int
    mean_delay: float | None
    p50: float | None
    p90: float | None
    p99: float | None
    mean_delay_last_byte: float | None
    relative_error: float | None
    relative_error_last_byte: float | None
    integer_split_frames: int
    analytical_frames: int
    retry_violations: int
    single_retry_assumption_held: bool | None

    @property
    def empty(self) -> bool:
        return self.samples == 0


def _check_match(report: SimReport, p: DesignParams, bitrate: float) -> None:
    cfg = report.config
    problems = []
    if cfg.frame.total_len != round(p.frame_len):
        problems.append(f"frame length {cfg.frame.total_len} vs {p.frame_len}")
    if cfg.trigger_payload != math.ceil(p.trigger_payload):
        problems.append(f"trigger payload {cfg.trigger_payload} vs {p.trigger_payload}")
    if not math.isclose(cfg.duty_cycle, p.duty_cycle, rel_tol=1e-12):
        problems.append(f"duty cycle {cfg.duty_cycle} vs {p.duty_cycle}")
    if not math.isclose(cfg.frame_error_rate, p.frame_error_rate, rel_tol=1e-12, abs_tol=1e-15):
        problems.append(f"frame error rate {cfg.frame_error_rate} vs {p.frame_error_rate}")
    if not math.isclose(cfg.bitrate, bitrate, rel_tol=1e-12):
        problems.append(f"bit rate {cfg.bitrate} vs {bitrate}")
    if abs(cfg.frame.payload_len / cfg.frame.total_len - p.efficiency) > 1 / cfg.frame.total_len:
        problems.append(f"frame efficiency {cfg.frame.payload_len}/{cfg.frame.total_len} vs {p.efficiency}")
    if problems:
        raise ParameterMismatchError("report does not match design: " + "; ".join(problems))


def compare_to_analytical(report: SimReport, p: DesignParams, bitrate: float) -> Comparison:
    """Empirical trigger delivery delay against the closed-form prediction."""
    _check_match(report, p, bitrate)
    predicted = total_trigger_delay(p, bitrate)
    samples = np.asarray(report.delay_samples, dtype=float)
    last = np.asarray(report.delay_samples_last_byte, dtype=float)
    single = report.config.retransmission_mode is RetransmissionMode.SINGLE_RETRY
    base = dict(
        predicted_delay=predicted,
        samples=int(samples.size),
        integer_split_frames=math.ceil(report.config.trigger_payload / report.config.frame.d2_len),
        analytical_frames=frames_per_trigger(p, True),
        retry_violations=report.retry_violations,
        single_retry_assumption_held=(report.retry_violations == 0) if single else None,
    )
    if samples.size == 0:
        return Comparison(mean_delay=None, p50=None, p90=None, p99=None,
                          mean_delay_last_byte=None, relative_error=None,
                          relative_error_last_byte=None, **base)
    mean = float(samples.mean())
    mean_last = float(last.mean())
    p50, p90, p99 = (float(v) for v in np.percentile(samples, [50, 90, 99]))
    return Comparison(
        mean_delay=mean, p50=p50, p90=p90, p99=p99, mean_delay_last_byte=mean_last,
        relative_error=abs(mean - predicted) / predicted,
        relative_error_last_byte=abs(mean_last - predicted) / predicted,
        **base,
    )


def required_buffer(report: SimReport) -> float | None:
    """Peak continuous backlog expressed in seconds of generation; ``None`` if no continuous stream."""
    if report.config.continuous_rate <= 0:
        return None
    return report.buffer_max * 8 / report.config.continuous_rate


def write_trace(rows: Sequence[tuple], fh) -> None:
    import csv

    writer = csv.writer(fh)
    writer.writerow(TRACE_COLUMNS)
    for row in rows:
        writer.writerow((f"{row[0]:.6f}", *row[1:]))
