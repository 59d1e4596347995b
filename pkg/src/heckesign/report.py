"""Experiment reports: one record per result, rendered as text, JSON or CSV."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

PASS, FAIL, INFO = "pass", "fail", "info"


@dataclass(frozen=True)
class Table:
    columns: tuple
    rows: tuple

    @classmethod
    def of(cls, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> "Table":
        return cls(tuple(columns), tuple(tuple(r) for r in rows))

    def as_dict(self) -> dict:
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, d: dict) -> "Table":
        return cls.of(d["columns"], d["rows"])


def _encode(value):
    if isinstance(value, Table):
        return {"table": value.as_dict()}
    return value


def _decode(value):
    if isinstance(value, dict) and set(value) == {"table"}:
        return Table.from_dict(value["table"])
    return value


@dataclass(frozen=True)
class ExperimentReport:
    """A result with an optional expectation.

    The verdict is derived: pass iff deviation <= tolerance, info when there
    is no tolerance to judge against.
    """

    id: str
    params: Dict[str, Any] = field(default_factory=dict)
    observed: Any = None
    expected: Any = None
    deviation: Optional[float] = None
    tolerance: Optional[float] = None
    note: Optional[str] = None

    @property
    def verdict(self) -> str:
        if self.tolerance is None or self.deviation is None:
            return INFO
        return PASS if self.deviation <= self.tolerance else FAIL

    def as_dict(self) -> dict:
        out = {
            "id": self.id,
            "params": self.params,
            "observed": _encode(self.observed),
            "expected": _encode(self.expected),
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }
        if self.note:
            out["note"] = self.note
        return out

    def to_json(self) -> str:
        # float repr is shortest round-trip, so this is lossless
        return json.dumps(self.as_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(
            id=d["id"],
            params=d.get("params", {}),
            observed=_decode(d.get("observed")),
            expected=_decode(d.get("expected")),
            deviation=d.get("deviation"),
            tolerance=d.get("tolerance"),
            note=d.get("note"),
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        return cls.from_dict(json.loads(text))


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def format_table(table: Table) -> str:
    cells = [list(table.columns)] + [[_fmt(v) for v in r] for r in table.rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(table.columns))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def format_text(report: ExperimentReport) -> str:
    params = " ".join(f"{k}={_fmt(v)}" for k, v in report.params.items())
    head = f"{report.id:<22} {report.verdict:<5}"
    parts = [head + (f"  [{params}]" if params else "")]
    if isinstance(report.observed, Table):
        parts.append(format_table(report.observed))
    else:
        parts.append(f"  observed  {_fmt(report.observed)}")
    if report.expected is not None and not isinstance(report.expected, Table):
        parts.append(f"  expected  {_fmt(report.expected)}")
    if report.deviation is not None:
        parts.append(f"  deviation {_fmt(report.deviation)} (tolerance {_fmt(report.tolerance)})")
    if report.note:
        parts.append(f"  note      {report.note}")
    return "\n".join(parts)


def format_csv(reports: List[ExperimentReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    tables = [r for r in reports if isinstance(r.observed, Table)]
    if len(reports) == 1 and tables:
        w.writerow(tables[0].observed.columns)
        w.writerows(tables[0].observed.rows)
        return buf.getvalue()
    w.writerow(["id", "observed", "expected", "deviation", "tolerance", "verdict"])
    for r in reports:
        obs = "table" if isinstance(r.observed, Table) else _fmt(r.observed)
        w.writerow([r.id, obs, _fmt(r.expected), _fmt(r.deviation), _fmt(r.tolerance), r.verdict])
    return buf.getvalue()
