"""Verification reports shared by every check and by the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
CONDITIONAL = "conditional"
REFUSED = "refused"

STATUSES = (PASS, FAIL, INCONCLUSIVE, CONDITIONAL, REFUSED)

# exit codes: 0 all pass, 1 any fail, 2 only inconclusive/conditional, 3 refused or usage error
EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_ERROR = 0, 1, 2, 3

REPORT_SCHEMA = "1"


def jsonable(value: Any) -> Any:
    """Convert report payloads to plain JSON types (rationals become strings)."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        items = [jsonable(v) for v in value]
        return sorted(items, key=lambda x: json.dumps(x, sort_keys=True))
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return str(value)


@dataclass
class Check:
    name: str
    status: str
    witness: Optional[Dict[str, Any]] = None
    details: Dict[str, Any] = field(default_factory=dict)
    count: Optional[int] = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAIL and not self.witness:
            raise ValueError(f"check {self.name!r} failed without a witness")

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"name": self.name, "status": self.status}
        if self.count is not None:
            out["count"] = self.count
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        out["details"] = jsonable(self.details)
        return out


def worst_exit_code(statuses: Iterable[str]) -> int:
    statuses = set(statuses)
    if REFUSED in statuses:
        return EXIT_ERROR
    if FAIL in statuses:
        return EXIT_FAIL
    if INCONCLUSIVE in statuses or CONDITIONAL in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


@dataclass
class CheckReport:
    subject: Dict[str, Any] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    command: Optional[List[str]] = None
    elapsed_ms: Optional[int] = None

    def add(self, name: str, status: str, witness=None, count=None, **details) -> Check:
        c = Check(name, status, witness, details, count)
        self.checks.append(c)
        return c

    def extend(self, other: "CheckReport", prefix: str = "") -> "CheckReport":
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.status, c.witness, c.details, c.count))
        return self

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(c.name == name for c in self.checks)

    @property
    def exit_code(self) -> int:
        return worst_exit_code(c.status for c in self.checks)

    @property
    def status(self) -> str:
        return {EXIT_OK: PASS, EXIT_FAIL: FAIL, EXIT_INCONCLUSIVE: INCONCLUSIVE, EXIT_ERROR: REFUSED}[
            self.exit_code
        ]

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_OK

    def to_dict(self) -> Dict[str, Any]:
        from . import __version__

        out: Dict[str, Any] = {
            "schema": REPORT_SCHEMA,
            "tool_version": __version__,
            "command": self.command,
            "subject": jsonable(self.subject),
            "status": self.status,
            "exit_code": self.exit_code,
            "checks": [c.to_dict() for c in self.checks],
        }
        if self.elapsed_ms is not None:
            out["elapsed_ms"] = self.elapsed_ms
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        d = self.to_dict()
        lines = []
        if self.command:
            lines.append("$ " + " ".join(self.command))
        subj = ", ".join(f"{k}={v}" for k, v in d["subject"].items())
        lines.append(f"subject: {subj}")
        for c in d["checks"]:
            head = f"{c['status'].upper():<12} {c['name']}"
            if "count" in c:
                head += f"  ({c['count']} checked)"
            lines.append(head)
            if "witness" in c:
                for k, v in c["witness"].items():
                    lines.append(f"    witness.{k}: {_short(v)}")
            for k, v in c["details"].items():
                lines.append(f"    {k}: {_short(v)}")
        lines.append(f"overall: {d['status']} (exit {d['exit_code']})")
        if self.elapsed_ms is not None:
            lines.append(f"elapsed: {self.elapsed_ms} ms")
        return "\n".join(lines) + "\n"


def _short(v: Any, limit: int = 400) -> str:
    s = v if isinstance(v, str) else json.dumps(v, ensure_ascii=False)
    return s if len(s) <= limit else s[: limit - 3] + "..."
