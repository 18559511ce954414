import json
import subprocess
import sys

import pytest
from pydantic import ValidationError

from seisnet.cli import main
from seisnet.commands import cmd_design, cmd_plan, cmd_rates, cmd_simulate
from seisnet.config import ProjectConfig, groningen, load_config, preset
from seisnet.report import EXIT_INFEASIBLE, EXIT_INVALID, EXIT_OK


def edit(cfg: ProjectConfig, **sections) -> ProjectConfig:
    data = cfg.model_dump(mode="json")
    for path, value in sections.items():
        node = data
        *parents, leaf = path.split("__")
        for key in parents:
            node = node[key]
        node[leaf] = value
    return ProjectConfig.model_validate(data)


@pytest.fixture(scope="module")
def cfg():
    return groningen()


def test_config_round_trip(cfg, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    again = load_config(path)
    assert again == cfg
    assert again.to_json() == cfg.to_json()
    assert again.digest() == cfg.digest()


def test_validation_error_carries_field_path(cfg):
    data = cfg.model_dump(mode="json")
    data["design"]["reference"]["duty_cycle"] = 1.5
    with pytest.raises(ValidationError) as exc:
        ProjectConfig.model_validate(data)
    assert ("design", "reference", "duty_cycle") in [e["loc"] for e in exc.value.errors()]


def test_rates_groningen(cfg):
    report = cmd_rates(cfg)
    streams = {s["label"]: s for s in report.data["streams"]}
    assert streams["ANSI"]["bitrate"] == 400
    assert streams["ANSI"]["yearly_volume"] == pytest.approx(1.577e9, rel=5e-4)
    assert streams["GMM"]["yearly_volume"] == 81e6
    assert report.data["network_yearly_volume"] == pytest.approx(2.65e12, rel=1e-3)
    text = report.to_text()
    for needle in ("400", "1.577 GB", "81 MB", "2.652 TB"):
        assert needle in text


def test_rates_single_sensor(cfg):
    one = edit(cfg, scenario={"name": "Groningen", "node_count": 1, "streams": [
        {"kind": "continuous", "components": 1, "bits_per_sample": 4, "sample_rate": 50}]},
        design__continuous_rate=200, design__trigger_rate=1)
    report = cmd_rates(one)
    assert len(report.data["streams"]) == 1
    assert report.data["network_yearly_volume"] == 788_400_000


def test_rates_profile_without_streams_is_invalid(cfg):
    with pytest.raises(ValidationError):
        edit(cfg, scenario={"name": "Groningen", "streams": []})


def test_design_groningen(cfg):
    report = cmd_design(cfg)
    assert report.exit_code == EXIT_OK
    ref = report.data["reference"]
    assert ref["required_bitrate"] == pytest.approx(10_770, abs=10)
    assert report.data["feasible_count"] > 0
    assert report.data["chosen"]["feasible"]


def test_design_one_hour_is_nbiot_only():
    report = cmd_design(preset("groningen-1h"))
    ref = report.data["reference"]
    assert ref["required_bitrate"] == pytest.approx(107_700, abs=100)
    assert ref["technologies"] == ["NB-IoT"]
    assert ref["feasible"]


def test_design_infeasible_everywhere(cfg):
    bad = edit(cfg, design__ranges=None, design__continuous_rate=1e6)
    report = cmd_design(bad)
    assert report.exit_code == EXIT_INFEASIBLE
    assert report.data["diagnosis"][0]["failures"]


def test_plan_groningen(cfg):
    report = cmd_plan(cfg)
    assert report.data["node_count"] == 1600
    assert report.data["gateway_count_estimate"] == 45
    costs = {c["name"]: c["total_opex_cents"] for c in report.data["costs"]}
    assert costs == {"LoRa": 6_100_000, "NB-IoT": 15_600_000}
    assert "$61,000" in report.to_text()


def test_plan_one_node_region(cfg):
    report = cmd_plan(edit(cfg, topology__width=1, topology__height=1))
    assert report.data["node_count"] == 1
    assert report.data["gateways_placed"] == 1
    assert report.data["uncovered_nodes"] == []


def test_plan_zero_capacity(cfg):
    report = cmd_plan(edit(cfg, topology__gateway_capacity=0))
    assert len(report.data["overloaded_gateways"]) == report.data["gateways_placed"]


def test_simulate_lossless(cfg):
    report = cmd_simulate(edit(cfg, simulation__frame_error_rate=0.0))
    assert report.data["comparison"]["relative_error"] <= 0.02


def test_simulate_seeded_loss(cfg):
    report = cmd_simulate(edit(cfg, simulation__seed=2024))
    cmp = report.data["comparison"]
    assert cmp["samples"] == 16
    assert cmp["relative_error"] <= 0.05


def test_simulate_zero_duration(cfg):
    report = cmd_simulate(edit(cfg, simulation__duration=0))
    assert report.data["comparison"]["empty"]
    assert report.data["delay_samples"] == []


@pytest.mark.parametrize("command", [cmd_rates, cmd_design, cmd_plan, cmd_simulate])
def test_golden_reports_are_byte_identical(cfg, command):
    first, second = command(cfg).to_json(), command(groningen()).to_json()
    assert first == second
    doc = json.loads(first)
    assert doc["provenance"]["config_sha256"] == cfg.digest()
    assert doc["provenance"]["seed"] == cfg.simulation.seed


def test_text_and_json_agree(cfg):
    report = cmd_plan(cfg)
    text = report.to_text()
    assert str(report.data["gateway_count_estimate"]) in text
    assert f"{round(report.data['mean_load'], 2):.6g}" in text


# CLI ---------------------------------------------------------------------

def test_cli_json_to_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["design", "--preset", "groningen", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["data"]["reference"]["required_bitrate"] == pytest.approx(10_770, abs=10)


def test_cli_seed_override_and_trace(tmp_path):
    out, trace = tmp_path / "s.json", tmp_path / "t.csv"
    code = main(["simulate", "--preset", "groningen", "--seed", "7", "--format", "json",
                 "--out", str(out), "--trace", str(trace)])
    assert code == 0
    assert json.loads(out.read_text())["provenance"]["seed"] == 7
    assert trace.read_text().startswith("time,node,frame_no,flag,d1_bytes,d2_bytes,damaged,retry")


def test_cli_invalid_config_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    data = groningen().model_dump(mode="json")
    data["topology"]["node_spacing"] = -1
    path.write_text(json.dumps(data))
    assert main(["plan", "--config", str(path)]) == EXIT_INVALID
    assert "topology.node_spacing" in capsys.readouterr().err


def test_cli_infeasible_exit_code(tmp_path):
    data = groningen().model_dump(mode="json")
    data["design"]["ranges"] = None
    data["design"]["continuous_rate"] = 1e6
    path = tmp_path / "inf.json"
    path.write_text(json.dumps(data))
    assert main(["design", "--config", str(path)]) == EXIT_INFEASIBLE


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "seisnet", "rates", "--preset", "groningen",
                           "--format", "json"], capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["command"] == "rates"
