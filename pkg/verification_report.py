"""
Verification Report
Collects pass / fail / skipped check records, renders them as a text table or
JSON lines, and maps the outcome to a process exit code.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import pandas as pd

from errors import InputError

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"
MODES = ("text", "jsonl")


@dataclass
class CheckRecord:
    check: str
    anchor: str
    status: str
    residual: Optional[float] = None
    tol: Optional[float] = None
    reason: str = ""
    data: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        record = {
            "check": self.check,
            "anchor": self.anchor,
            "status": self.status,
            "residual": self.residual,
            "tol": self.tol,
        }
        if self.reason:
            record["reason"] = self.reason
        record.update(self.data)
        return record


class VerificationReport:
    """Result of one command: every check it ran, in order."""

    def __init__(self, title: str = ""):
        self.title = title
        self.checks: List[CheckRecord] = []

    def add_pass(self, check: str, anchor: str, residual: Optional[float] = None,
                 tol: Optional[float] = None, **data) -> CheckRecord:
        return self._add(CheckRecord(check, anchor, PASS, residual, tol, data=data))

    def add_fail(self, check: str, anchor: str, residual: Optional[float] = None,
                 tol: Optional[float] = None, reason: str = "", **data) -> CheckRecord:
        return self._add(CheckRecord(check, anchor, FAIL, residual, tol, reason, data))

    def add_skip(self, check: str, anchor: str, reason: str, **data) -> CheckRecord:
        if not reason:
            raise InputError("a skipped check needs a reason")
        return self._add(CheckRecord(check, anchor, SKIPPED, reason=reason, data=data))

    def add_result(self, check: str, anchor: str, residual: float, tol: float, **data) -> CheckRecord:
        """Pass when residual <= tol; NaN fails."""
        if residual <= tol:
            return self.add_pass(check, anchor, residual, tol, **data)
        return self.add_fail(check, anchor, residual, tol, **data)

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.checks.extend(other.checks)
        return self

    def _add(self, record: CheckRecord) -> CheckRecord:
        self.checks.append(record)
        return record

    def count(self, status: str) -> int:
        return sum(1 for c in self.checks if c.status == status)

    @property
    def passed(self) -> bool:
        return self.count(FAIL) == 0

    @property
    def overall(self) -> str:
        return PASS if self.passed else FAIL

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    @property
    def summary(self) -> str:
        counts = f"{len(self.checks)} checks, {self.count(FAIL)} failed, {self.count(SKIPPED)} skipped"
        if self.passed:
            return f"✅ PASSED — {counts}"
        return f"❌ FAILED — {counts}"

    def to_dict(self) -> Dict:
        return {
            "title": self.title,
            "overall": self.overall,
            "exit_code": self.exit_code,
            "checks": [c.to_dict() for c in self.checks],
            "summary": self.summary,
        }


def _json_safe(value):
    """Non-finite floats become null; JSON has no NaN or infinity."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    return value


def _number(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.3e}"


def _text(report: VerificationReport) -> str:
    lines = [f"lmx verification report: {report.title}" if report.title else "lmx verification report",
             f"overall: {report.overall}"]
    if report.checks:
        table = pd.DataFrame([{
            "check": c.check,
            "anchor": c.anchor,
            "status": c.status,
            "residual": _number(c.residual),
            "tol": _number(c.tol),
            "note": c.reason,
        } for c in report.checks])
        lines.append(table.to_string(index=False))
        for c in report.checks:
            if "value" in c.data:
                lines.append(f"{c.check} value:")
                lines.extend(f"  {row}" for row in _matrix_rows(c.data["value"]))
            if "terms" in c.data:
                lines.append(c.data["terms"])
    lines.append(report.summary)
    return "\n".join(lines) + "\n"


def _matrix_rows(pairs) -> List[str]:
    return ["  ".join(f"{re:+.10g}{im:+.10g}j" for re, im in row) for row in pairs]


def format_report(report: VerificationReport, mode: str = "text") -> bytes:
    """UTF-8 text table, or one JSON object per check for mode 'jsonl'."""
    if mode not in MODES:
        raise InputError(f"unknown report format {mode!r}; expected one of {MODES}")
    if mode == "jsonl":
        lines = (json.dumps(_json_safe(c.to_dict()), allow_nan=False) for c in report.checks)
        return "".join(line + "\n" for line in lines).encode("utf-8")
    return _text(report).encode("utf-8")
