"""Experiment reports and their JSON/CSV serialization.

Integers are written exactly, rationals as "a/b" strings, reals rounded to
12 significant digits.  Field order is insertion order, so a report built
deterministically serializes to identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .errors import IdentityViolation


def jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.12g}")
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in x]
    if hasattr(x, "as_dict"):
        return jsonable(x.as_dict())
    raise TypeError(f"cannot serialize {type(x).__name__}")


@dataclass
class ExperimentReport:
    command: str
    config: dict = dc_field(default_factory=dict)
    summary: dict = dc_field(default_factory=dict)
    table: list[dict] = dc_field(default_factory=list)

    def check_counts(self) -> None:
        """Refuse to exist with disagreeing brute-force and Fourier counts."""
        pairs = [self.summary] + self.table
        for row in pairs:
            if "count" in row and "fourier" in row and row["count"] != row["fourier"]:
                raise IdentityViolation(f"Fourier count {row['fourier']} != brute force {row['count']}")

    def to_jsonable(self) -> dict:
        self.check_counts()
        return {
            "command": self.command,
            "config": jsonable(self.config),
            "summary": jsonable(self.summary),
            "table": jsonable(self.table),
        }


def emit(report: ExperimentReport, fmt: str = "json") -> bytes:
    data = report.to_jsonable()
    if fmt == "json":
        return (json.dumps(data, indent=2) + "\n").encode()
    if fmt == "csv":
        return _csv(data).encode()
    raise ValueError(f"unknown format {fmt!r}")


def _cell(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, separators=(",", ":"))
    if v is None:
        return ""
    return str(v)


def _flatten(prefix: str, obj, out: list):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    else:
        out.append((prefix, obj))


def _csv(data: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    table = data["table"]
    if table or not data["summary"]:
        cols: list[str] = []
        for row in table:
            for k in row:
                if k not in cols:
                    cols.append(k)
        w.writerow(cols)
        for row in table:
            w.writerow([_cell(row.get(c)) for c in cols])
    else:
        items: list = []
        _flatten("", data["summary"], items)
        w.writerow(["key", "value"])
        for k, v in items:
            w.writerow([k, _cell(v)])
    return buf.getvalue()
