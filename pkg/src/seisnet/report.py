"""Report document and its JSON / plain-text renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INVALID = 2
EXIT_INTERNAL = 3


@dataclass
class Table:
    title: str
    columns: list[str]
    rows: list[list[Any]]

    def to_dict(self) -> dict:
        return {"title": self.title, "columns": self.columns, "rows": self.rows}


@dataclass
class Report:
    command: str
    data: dict[str, Any]
    tables: list[Table] = field(default_factory=list)
    provenance: dict[str, Any] = field(default_factory=dict)
    exit_code: int = EXIT_OK
    trace_rows: list[tuple] = field(default_factory=list, repr=False)  # written as CSV, never serialised

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "data": self.data,
            "tables": [t.to_dict() for t in self.tables],
            "provenance": self.provenance,
            "exit_code": self.exit_code,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_text(self) -> str:
        out = [f"== seisnet {self.command} =="]
        for t in self.tables:
            out.append("")
            out.append(render_table(t))
        out.append("")
        out.append("provenance: " + ", ".join(f"{k}={v}" for k, v in sorted(self.provenance.items())))
        return "\n".join(out) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_text()


def fmt_cell(v: Any) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def render_table(t: Table) -> str:
    cells = [[fmt_cell(v) for v in row] for row in t.rows]
    widths = [len(c) for c in t.columns]
    for row in cells:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    numeric = [all(isinstance(r[i], (int, float)) and not isinstance(r[i], bool)
                   for r in t.rows if r[i] is not None) and t.rows
               for i in range(len(t.columns))]

    def line(values):
        return "  ".join(v.rjust(w) if num else v.ljust(w)
                         for v, w, num in zip(values, widths, numeric)).rstrip()

    lines = [t.title, line(t.columns), "  ".join("-" * w for w in widths)]
    lines += [line(row) for row in cells]
    return "\n".join(lines)


def si_bytes(n: float) -> str:
    for unit, scale in (("TB", 1e12), ("GB", 1e9), ("MB", 1e6), ("kB", 1e3)):
        if abs(n) >= scale:
            return f"{n / scale:.4g} {unit}"
    return f"{n:.4g} B"
