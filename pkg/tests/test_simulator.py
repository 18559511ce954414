import io
import math

import pytest

from conftest import MID
from seisnet.crosslayer import required_bitrate, total_trigger_delay
from seisnet.errors import InvalidFrameError, ParameterMismatchError
from seisnet.frames import FrameSpec, split_payload
from seisnet.simulator import (RetransmissionMode, SimConfig, compare_to_analytical,
                               required_buffer, run, write_trace)

LOSSLESS = MID.with_(frame_error_rate=0.0)
RB = required_bitrate(MID)


def mid_config(p=LOSSLESS, **kw):
    kw.setdefault("duration", 86_400)
    kw.setdefault("trigger_times", (0.0,))
    return SimConfig.from_design(p, RB, **kw)


def test_lossless_trigger_matches_integer_split_oracle():
    cfg = mid_config()
    report = run(cfg)
    n = math.ceil(216_000 / 57)  # 3790 d2 slots
    assert report.delay_samples == [pytest.approx(n * cfg.period, rel=1e-12)]
    assert report.delay_samples_last_byte == [pytest.approx((n - 1) * cfg.period + cfg.frame_time,
                                                            rel=1e-12)]
    assert report.delay_samples[0] == pytest.approx(36_000, rel=0.02)


def test_single_d2_payload_is_one_period():
    cfg = SimConfig.from_design(LOSSLESS.with_(trigger_payload=57), RB,
                                duration=100, trigger_times=(0.0,))
    assert run(cfg).delay_samples == [pytest.approx(cfg.period, rel=1e-12)]


def test_comparison_lossless_within_two_percent():
    report = run(mid_config())
    cmp = compare_to_analytical(report, LOSSLESS, RB)
    assert cmp.relative_error <= 0.02
    assert cmp.integer_split_frames == 3790 and cmp.analytical_frames == 3750
    assert cmp.single_retry_assumption_held is None


def test_comparison_with_loss_within_five_percent():
    cfg = mid_config(MID, node_count=12, retransmission_mode="single_retry", rng_seed=11)
    report = run(cfg)
    assert report.triggers_delivered == 12
    cmp = compare_to_analytical(report, MID, RB)
    assert cmp.samples == 12
    assert cmp.relative_error <= 0.05
    assert cmp.predicted_delay == pytest.approx(total_trigger_delay(MID, RB))


def test_comparison_without_triggers_is_empty():
    cfg = mid_config(trigger_times=(), duration=1000, continuous_rate=50)
    cmp = compare_to_analytical(run(cfg), LOSSLESS, RB)
    assert cmp.empty and cmp.mean_delay is None


def test_comparison_rejects_mismatched_design():
    report = run(mid_config(duration=100))
    with pytest.raises(ParameterMismatchError):
        compare_to_analytical(report, LOSSLESS.with_(duty_cycle=0.02), RB)
    with pytest.raises(ParameterMismatchError):
        compare_to_analytical(report, LOSSLESS, RB * 2)


def test_fer_converges_with_persistent_retries():
    lam = 0.5
    p = LOSSLESS.with_(frame_error_rate=lam, trigger_payload=2000)
    cfg = SimConfig.from_design(p, RB, duration=40_000, node_count=4,
                                trigger_times=(0.0, 5000.0, 10_000.0),
                                continuous_rate=40, retransmission_mode="persistent", rng_seed=3)
    report = run(cfg)
    n = report.frames_sent
    sigma = math.sqrt(lam * (1 - lam) / n)
    assert abs(report.fer - lam) <= 3 * sigma
    assert report.triggers_delivered == report.triggers_generated == 12
    # at most one damaged frame per node is still waiting for its resend at the end
    assert 0 <= report.frames_damaged - report.frames_retransmitted <= cfg.node_count


def test_single_retry_counts_assumption_violations():
    p = LOSSLESS.with_(frame_error_rate=0.3, trigger_payload=5000)
    cfg = SimConfig.from_design(p, RB, duration=20_000, trigger_times=(0.0,),
                                retransmission_mode=RetransmissionMode.SINGLE_RETRY, rng_seed=1)
    report = run(cfg)
    assert report.retry_violations > 0
    assert compare_to_analytical(report, p, RB).single_retry_assumption_held is False
    assert report.intermittent.delivered == 5000


def test_stable_buffer_bounded_by_one_period():
    # 0.01 * 10774.76 * 115 / 128 ~ 96.8 bps of payload service
    cfg = mid_config(trigger_times=(), continuous_rate=80, duration=50_000)
    report = run(cfg)
    assert not report.buffer_unstable
    assert required_buffer(report) <= cfg.period + 8 / 80


def test_overloaded_buffer_detected_and_grows():
    short = run(mid_config(trigger_times=(), continuous_rate=400, duration=20_000))
    long = run(mid_config(trigger_times=(), continuous_rate=400, duration=40_000))
    assert short.buffer_unstable and long.buffer_unstable
    assert required_buffer(long) == pytest.approx(2 * required_buffer(short), rel=0.02)


def test_required_buffer_undefined_without_continuous_stream():
    assert required_buffer(run(mid_config(duration=100))) is None


def test_trigger_flag_rule_in_trace():
    p = LOSSLESS.with_(trigger_payload=1000)
    cfg = SimConfig.from_design(p, RB, duration=2000, trigger_times=(0.0, 30.0), trace=True)
    report = run(cfg)
    flagged = [row for row in report.trace if row[3] == 1]
    d2 = [row[5] for row in flagged]
    assert sum(d2) == 2000
    # every flagged frame carries a full d2 share except the very last one
    assert all(b == 57 for b in d2[:-1]) and 0 < d2[-1] <= 57


def test_trace_csv():
    cfg = SimConfig.from_design(LOSSLESS.with_(trigger_payload=200), RB, duration=100,
                                trigger_times=(0.0,), trace=True, continuous_rate=100)
    buf = io.StringIO()
    write_trace(run(cfg).trace, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "time,node,frame_no,flag,d1_bytes,d2_bytes,damaged,retry"
    assert len(lines) > 2


def test_conservation_and_zero_duration():
    report = run(mid_config(duration=0, continuous_rate=400))
    assert report.slots == 0 and report.delay_samples == []
    assert report.continuous.balanced() and report.intermittent.balanced()
    assert report.aggregate_throughput == 0


def test_same_seed_same_report_and_seed_matters():
    cfg = mid_config(MID, node_count=3, duration=20_000, trigger_rate=1 / 3000,
                     continuous_rate=50, rng_seed=42)
    a, b = run(cfg), run(cfg, workers=3)
    assert a == b
    other = run(SimConfig(**{**cfg.__dict__, "rng_seed": 43}))
    assert [t.arrival for t in other.triggers] != [t.arrival for t in a.triggers]


def test_empty_payload_rejected_before_run():
    with pytest.raises(InvalidFrameError):
        SimConfig(frame=FrameSpec(16, 16, 0, 0), bitrate=1000, duty_cycle=0.1)


def test_triggers_need_d2_room():
    with pytest.raises(InvalidFrameError):
        SimConfig(frame=FrameSpec(16, 0, 16, 0), bitrate=1000, duty_cycle=0.1,
                  trigger_payload=10, trigger_times=(0.0,))


def test_short_run_warns(caplog):
    SimConfig(frame=split_payload(128, 0.9, 1), bitrate=1000, duty_cycle=0.1,
              trigger_rate=1e-6, trigger_payload=10, duration=10)
    assert "fewer than one expected trigger" in caplog.text
