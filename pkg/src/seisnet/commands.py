"""The four workflow commands, each turning a validated config into a Report."""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict

from . import __version__
from .config import ProjectConfig
from .cost import OMITTED_COSTS_DISCLAIMER, format_money, total_opex
from .crosslayer import (DesignOutcome, DesignParams, check_feasibility,
                         design_search, required_bitrate)
from .report import EXIT_INFEASIBLE, EXIT_OK, Report, Table, si_bytes
from .scenarios import StreamKind, network_yearly_volume, stream_bitrate, trigger_payload, yearly_volume
from .simulator import SimConfig, compare_to_analytical, required_buffer, run
from .topology import Region, gateway_count, grid_nodes, plan_network


def _provenance(cfg: ProjectConfig, command: str) -> dict:
    return {
        "command": command,
        "config_sha256": cfg.digest(),
        "seed": cfg.simulation.seed,
        "tool_version": __version__,
    }


def _outcome_dict(o: DesignOutcome) -> dict:
    return {
        "params": asdict(o.params),
        "required_bitrate": o.required_bitrate,
        "frames_needed": o.frames_needed,
        "total_delay": o.total_delay,
        "feasible": o.feasible,
        "criteria": [{"name": c.name, "passed": c.passed, "reason": c.reason,
                      "warnings": list(c.warnings)} for c in o.criteria],
        "technologies": [t.name for t in o.technologies],
    }


def _outcome_row(label: str, o: DesignOutcome) -> list:
    p = o.params
    return [label, p.efficiency, p.frame_len, p.trigger_payload, p.delay_budget, p.duty_cycle,
            p.split_ratio, p.frame_error_rate, round(o.required_bitrate, 2), o.frames_needed,
            o.feasible, ",".join(t.name for t in o.technologies) or "-"]


_OUTCOME_COLUMNS = ["design", "eta_f", "L_f", "L_D2", "t_D2", "delta_c", "rho_d", "lambda_f",
                    "R_b [bps]", "frames", "feasible", "technologies"]


def cmd_rates(cfg: ProjectConfig) -> Report:
    profile = cfg.profile()
    rows, streams = [], []
    for s in profile.streams:
        payload = trigger_payload(s) if s.kind is StreamKind.INTERMITTENT else None
        entry = {
            "label": s.label, "kind": s.kind.value,
            "bitrate": stream_bitrate(s),
            "yearly_volume": yearly_volume(s),
            "trigger_payload": payload,
        }
        streams.append(entry)
        rows.append([s.label or "-", s.kind.value, entry["bitrate"], si_bytes(entry["yearly_volume"]),
                     si_bytes(payload) if payload is not None else None])
    total = network_yearly_volume(profile)
    per_sensor = total / profile.node_count
    rows.append(["per sensor", "total", None, si_bytes(per_sensor), None])
    rows.append([f"network ({profile.node_count} nodes)", "total", None, si_bytes(total), None])
    return Report(
        command="rates",
        data={"scenario": profile.name, "node_count": profile.node_count, "streams": streams,
              "per_sensor_yearly_volume": per_sensor, "network_yearly_volume": total},
        tables=[Table(f"Data generation: {profile.name}",
                      ["stream", "kind", "rate [bps]", "yearly volume", "per trigger"], rows)],
        provenance=_provenance(cfg, "rates"),
    )


def cmd_design(cfg: ProjectConfig) -> Report:
    catalog = cfg.catalog_entries()
    r_c, trig = cfg.continuous_rate(), cfg.trigger_rate_per_second()
    ranges = cfg.design.build_ranges()
    result = design_search(ranges, cfg.design.objective, r_c, trig, catalog)

    data = {
        "objective": cfg.design.objective,
        "continuous_rate": r_c,
        "trigger_rate_per_year": trig * 365 * 86_400,
        "candidates": len(ranges),
        "feasible_count": len(result.feasible),
        "chosen": _outcome_dict(result.best) if result.best else None,
        "pareto": [_outcome_dict(o) for o in result.pareto],
    }
    tables = []
    rows = []
    if cfg.design.reference is not None:
        ref = cfg.design.reference.build()
        ref_outcome = check_feasibility(ref, required_bitrate(ref), r_c, trig, catalog)
        data["reference"] = _outcome_dict(ref_outcome)
        rows.append(_outcome_row("reference", ref_outcome))
        tables.append(Table("Reference design criteria", ["criterion", "passed", "reason"],
                            [[c.name, c.passed, c.reason + "".join(f" [warning: {w}]" for w in c.warnings)]
                             for c in ref_outcome.criteria]))
    if result.best:
        rows.append(_outcome_row("chosen", result.best))
    rows += [_outcome_row(f"pareto[{i}]", o) for i, o in enumerate(result.pareto)]
    tables.insert(0, Table(f"Design search: {len(result.feasible)} of {len(ranges)} feasible",
                           _OUTCOME_COLUMNS, rows))

    failures = Counter(f.split(":")[0] for o in result.rejected for f in o.failures())
    data["rejection_counts"] = dict(sorted(failures.items()))
    exit_code = EXIT_OK
    if not result.feasible:
        exit_code = EXIT_INFEASIBLE
        data["diagnosis"] = [{"params": asdict(o.params), "failures": o.failures()}
                             for o in result.rejected]
        tables.append(Table("No feasible design; rejections by criterion", ["criterion", "count"],
                            [[k, v] for k, v in sorted(failures.items())]))
    return Report("design", data, tables, _provenance(cfg, "design"), exit_code)


def _reference_bitrate(cfg: ProjectConfig) -> float | None:
    ref = cfg.design.reference
    return required_bitrate(ref.build()) if ref is not None else None


def cmd_plan(cfg: ProjectConfig) -> Report:
    topo = cfg.topology
    if topo is None:
        raise ValueError("config has no topology section")
    region = Region(topo.width, topo.height)
    nodes = grid_nodes(region, topo.node_spacing)
    uplink = topo.per_node_uplink or _reference_bitrate(cfg)
    if uplink is None:
        raise ValueError("topology.per_node_uplink is required without a design.reference")
    plan = plan_network(topo.architecture, nodes, topo.gateway_spacing, uplink,
                        topo.max_link_distance, topo.gateway_capacity, topo.gateways())
    estimate = gateway_count(region, topo.gateway_spacing)

    cost_rows, costs = [], []
    for c in cfg.costs:
        model = c.build(len(nodes), estimate)
        total = total_opex(model)
        costs.append({"name": model.name, **{k: v for k, v in asdict(model).items() if k != "name"},
                      "total_opex_cents": total})
        cost_rows.append([model.name, model.node_count, model.gateway_count, model.extra_mast_count,
                          format_money(model.subscription_per_node_year), model.years,
                          format_money(total)])

    data = {
        "architecture": plan.architecture.value,
        "region_km": [region.width, region.height],
        "node_count": len(nodes),
        "gateway_count_estimate": estimate,
        "gateways_placed": len(plan.gateways),
        "per_node_uplink": uplink,
        "covered_nodes": len(nodes) - len(plan.uncovered),
        "uncovered_nodes": plan.uncovered,
        "overloaded_gateways": plan.overloaded,
        "per_gateway_load": plan.per_gateway_load,
        "mean_load": plan.mean_load,
        "mean_load_at_estimate": plan.estimate_mean_load,
        "max_link_distance": max(plan.link_distance) if plan.link_distance else 0.0,
        "notes": plan.notes,
        "costs": costs,
        "disclaimer": OMITTED_COSTS_DISCLAIMER,
    }
    summary = [
        ["architecture", plan.architecture.value],
        ["nodes", len(nodes)],
        ["gateways (area estimate)", estimate],
        ["gateways placed", len(plan.gateways)],
        ["uncovered nodes", len(plan.uncovered)],
        ["overloaded gateways", len(plan.overloaded)],
        ["mean load [bps]", round(plan.mean_load, 2)],
        ["mean load at estimate [bps]", round(plan.estimate_mean_load, 2)],
    ] + [["note", n] for n in plan.notes]
    tables = [Table("Network plan", ["item", "value"], summary)]
    if cost_rows:
        tables.append(Table("Opex estimate", ["network", "nodes", "gateways", "masts",
                                              "subscription/node/yr", "years", "total"], cost_rows))
        tables.append(Table("Note", ["disclaimer"], [[OMITTED_COSTS_DISCLAIMER]]))
    return Report("plan", data, tables, _provenance(cfg, "plan"))


def build_sim_config(cfg: ProjectConfig) -> tuple[SimConfig, DesignParams]:
    sim = cfg.simulation
    if cfg.design.reference is None:
        raise ValueError("simulation needs design.reference to lay out frames")
    ref = cfg.design.reference.build()
    if sim.frame_error_rate is not None:
        ref = ref.with_(frame_error_rate=sim.frame_error_rate)
    bitrate = sim.bitrate or required_bitrate(ref)
    r_c = sim.continuous_rate if sim.continuous_rate is not None else cfg.continuous_rate()
    sim_cfg = SimConfig.from_design(
        ref, bitrate,
        continuous_rate=r_c,
        trigger_rate=sim.trigger_rate / (365 * 86_400),
        retransmission_mode=sim.retransmission_mode,
        duration=sim.duration,
        node_count=sim.node_count,
        rng_seed=sim.seed,
        trigger_times=tuple(sim.trigger_times),
    )
    return sim_cfg, ref


def cmd_simulate(cfg: ProjectConfig, trace: bool = False) -> Report:
    sim_cfg, ref = build_sim_config(cfg)
    if trace:
        from dataclasses import replace

        sim_cfg = replace(sim_cfg, trace=True)
    report = run(sim_cfg, workers=cfg.simulation.workers)
    cmp = compare_to_analytical(report, ref, sim_cfg.bitrate)
    t_b = required_buffer(report)
    data = {
        "bitrate": sim_cfg.bitrate,
        "frame": asdict(sim_cfg.frame),
        "period": report.period,
        "frame_time": report.frame_time,
        "slots_per_node": report.slots,
        "triggers_generated": report.triggers_generated,
        "triggers_delivered": report.triggers_delivered,
        "delay_samples": report.delay_samples,
        "delay_samples_last_byte": report.delay_samples_last_byte,
        "frames_sent": report.frames_sent,
        "frames_damaged": report.frames_damaged,
        "frames_retransmitted": report.frames_retransmitted,
        "empirical_fer": report.fer,
        "continuous": asdict(report.continuous),
        "intermittent": asdict(report.intermittent),
        "buffer_max_bytes": report.buffer_max,
        "buffer_mean_bytes": report.buffer_mean,
        "buffer_unstable": report.buffer_unstable,
        "required_buffer_seconds": t_b,
        "node_throughput": report.node_throughput,
        "aggregate_throughput": report.aggregate_throughput,
        "comparison": {**asdict(cmp), "empty": cmp.empty},
    }
    rows = [
        ["nodes", sim_cfg.node_count], ["duration [s]", sim_cfg.duration],
        ["bit rate [bps]", round(sim_cfg.bitrate, 3)],
        ["frame L_f/L_h/d1/d2 [B]", f"{sim_cfg.frame.total_len}/{sim_cfg.frame.header_len}/"
                                    f"{sim_cfg.frame.d1_len}/{sim_cfg.frame.d2_len}"],
        ["period t_o [s]", report.period],
        ["triggers delivered", f"{report.triggers_delivered}/{report.triggers_generated}"],
        ["predicted delay [s]", cmp.predicted_delay],
        ["mean delay [s]", cmp.mean_delay],
        ["mean delay to last byte [s]", cmp.mean_delay_last_byte],
        ["relative error", cmp.relative_error],
        ["empirical FER", report.fer],
        ["single-retry violations", report.retry_violations],
        ["max buffer [B]", report.buffer_max],
        ["required buffer t_b [s]", t_b],
        ["buffer unstable", report.buffer_unstable],
        ["aggregate throughput [bps]", report.aggregate_throughput],
    ]
    if cmp.empty:
        rows.append(["comparison", "no trigger delivered; nothing to compare"])
    return Report("simulate", data, [Table("Simulation", ["item", "value"], rows)],
                  _provenance(cfg, "simulate"), trace_rows=report.trace)


COMMANDS = {
    "rates": cmd_rates,
    "design": cmd_design,
    "plan": cmd_plan,
    "simulate": cmd_simulate,
}

