"""Machine-readable verification outcomes and their JSON-lines/CSV encodings."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

REPORT_SCHEMA = 1


def _jsonable(value):
    """Coerce numpy scalars (and containers of them) to plain Python types."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, bool):
        return value
    if isinstance(value, complex):
        return [value.real, value.imag]
    if hasattr(value, "item"):
        return _jsonable(value.item())
    return value


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one numerical identity check.

    ``passed`` holds iff the absolute error or the (scale-normalized)
    relative error is within tolerance.
    """

    name: str
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    tolerance: float
    passed: bool
    context: dict = field(default_factory=dict)

    def to_json_obj(self, suite: str = "") -> dict:
        lhs = complex(self.lhs)
        rhs = complex(self.rhs)
        return {
            "schema": REPORT_SCHEMA,
            "suite": suite,
            "check": self.name,
            "lhs": [lhs.real, lhs.imag],
            "rhs": [rhs.real, rhs.imag],
            "abs_err": float(self.abs_err),
            "rel_err": float(self.rel_err),
            "tolerance": float(self.tolerance),
            "pass": bool(self.passed),
            "context": _jsonable(self.context),
        }


def make_report(name, lhs, rhs, tolerance, scale=1.0, context=None) -> CheckReport:
    """Compare two complex values; ``scale`` normalizes the relative error."""
    lhs = complex(lhs)
    rhs = complex(rhs)
    abs_err = abs(lhs - rhs)
    rel_err = abs_err / max(float(scale), 1e-300)
    passed = abs_err <= tolerance or rel_err <= tolerance
    return CheckReport(name, lhs, rhs, abs_err, rel_err, float(tolerance), bool(passed),
                       dict(context or {}))


def expect_failure(report: CheckReport, factor=100.0) -> CheckReport:
    """Wrap a negative control: passes iff the underlying check fails loudly."""
    violated = report.abs_err > factor * report.tolerance
    return CheckReport(
        name="negative-control:" + report.name,
        lhs=report.lhs,
        rhs=report.rhs,
        abs_err=report.abs_err,
        rel_err=report.rel_err,
        tolerance=report.tolerance,
        passed=bool(violated),
        context={**report.context, "expected": "violation", "factor": factor},
    )


def write_jsonl(path, suite: str, reports) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(json.dumps(r.to_json_obj(suite), sort_keys=False))
            fh.write("\n")


CSV_HEADER = ["suite", "check", "abs_err", "rel_err", "tol", "pass"]


def write_csv(path, rows) -> None:
    """rows: iterable of (suite, CheckReport)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for suite, r in rows:
            writer.writerow([suite, r.name, repr(r.abs_err), repr(r.rel_err),
                             repr(r.tolerance), str(r.passed).lower()])
