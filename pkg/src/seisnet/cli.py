"""Command-line entry point: ``seisnet {rates,design,plan,simulate}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from . import __version__
from .commands import COMMANDS
from .config import PRESETS, ProjectConfig, load_config, preset
from .report import EXIT_INTERNAL, EXIT_INVALID
from .simulator import write_trace

log = logging.getLogger("seisnet")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seisnet",
        description="Capacity planning and simulation for duty-cycled LPWA seismic networks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "rates": "data generation rates and yearly volumes",
        "design": "bit-rate / delay design search",
        "plan": "gateway layout and opex",
        "simulate": "duty-cycle simulation against the delay formula",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", type=Path, help="JSON project config")
        src.add_argument("--preset", choices=sorted(PRESETS), help="built-in project")
        p.add_argument("--seed", type=int, help="override simulation.seed (unsigned 64-bit)")
        p.add_argument("--format", choices=("json", "text"), help="report format (default from config)")
        p.add_argument("--out", type=Path, help="write the report here instead of stdout")
        if name == "simulate":
            p.add_argument("--trace", type=Path, help="write a per-frame CSV trace")
    return parser


def _load(args) -> ProjectConfig:
    cfg = load_config(args.config) if args.config else preset(args.preset)
    if args.seed is not None:
        data = cfg.model_dump()
        data["simulation"]["seed"] = args.seed
        cfg = ProjectConfig.model_validate(data)
    return cfg


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"  {loc}: {err['msg']}")
    return "invalid configuration:\n" + "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load(args)
        if args.command == "simulate":
            report = COMMANDS["simulate"](cfg, trace=args.trace is not None)
        else:
            report = COMMANDS[args.command](cfg)
    except ValidationError as exc:
        print(_format_validation(exc), file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return EXIT_INTERNAL

    text = report.render(args.format or cfg.format)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    if getattr(args, "trace", None):
        with open(args.trace, "w", newline="") as fh:
            write_trace(report.trace_rows, fh)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
