"""Report tables shared by the human, JSON and DOT renderers."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


@dataclass(frozen=True)
class Num:
    """A numeric cell: decimal always, exact fraction when the value is rational."""

    value: Any

    @property
    def exact(self) -> str | None:
        v = self.value
        if isinstance(v, int) and not isinstance(v, bool):
            v = Fraction(v)
        if isinstance(v, Fraction):
            return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        return None

    def human(self) -> str:
        v = float(self.value)
        if math.isinf(v):
            return "inf"
        text = f"{v:.6f}"
        exact = self.exact
        if exact is not None and "/" in exact:
            text += f" ({exact})"
        return text

    def json(self) -> dict:
        v = float(self.value)
        return {"value": None if math.isinf(v) else v, "exact": self.exact}


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def add(self, *cells):
        if len(cells) != len(self.columns):
            raise ValueError("row width does not match the columns")
        self.rows.append(list(cells))


@dataclass
class Report:
    command: str
    tables: list[Table] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    text: str | None = None  # preformatted payload, e.g. DOT

    def table(self, name: str, columns: list[str]) -> Table:
        t = Table(name, columns)
        self.tables.append(t)
        return t


def _cell_human(c) -> str:
    if isinstance(c, Num):
        return c.human()
    if isinstance(c, bool):
        return "yes" if c else "no"
    if c is None:
        return "-"
    return str(c)


def _cell_json(c):
    if isinstance(c, Num):
        return c.json()
    return c


def render_human(report: Report) -> str:
    if report.text is not None:
        return report.text
    out = []
    for t in report.tables:
        out.append(f"== {t.name} ==")
        cells = [[_cell_human(c) for c in row] for row in t.rows]
        widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(t.columns)]
        out.append("  ".join(h.ljust(w) for h, w in zip(t.columns, widths)).rstrip())
        out.append("  ".join("-" * w for w in widths))
        for r in cells:
            out.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        out.append("")
    for n in report.notes:
        out.append(f"note: {n}")
    return "\n".join(out).rstrip() + "\n"


def report_dict(report: Report) -> dict:
    doc: dict[str, Any] = {
        "command": report.command,
        "tables": [
            {
                "name": t.name,
                "columns": t.columns,
                "rows": [{col: _cell_json(c) for col, c in zip(t.columns, row)} for row in t.rows],
            }
            for t in report.tables
        ],
        "notes": report.notes,
    }
    if report.text is not None:
        doc["text"] = report.text
    return doc


def render_json(report: Report) -> str:
    return json.dumps(report_dict(report), indent=2, ensure_ascii=False) + "\n"
