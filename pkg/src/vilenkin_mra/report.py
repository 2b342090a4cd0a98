"""Verification reports shared by every check in the package."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cyclotomic import CycloArray

__all__ = ["Check", "Report", "compare", "DEFAULT_TOL", "GRAM_TOL"]

DEFAULT_TOL = 1e-12
GRAM_TOL = 1e-10


@dataclass
class Check:
    name: str
    passed: bool
    max_deviation: float = 0.0
    exact: bool = True
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "max_deviation": float(self.max_deviation),
            "exact": bool(self.exact),
            "details": _jsonable(self.details),
        }


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, other: Report) -> Report:
        self.checks.extend(other.checks)
        return self

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name) -> bool:
        return any(c.name == name for c in self.checks)

    @property
    def failed(self) -> list:
        return [c for c in self.checks if not c.passed]

    @property
    def max_deviation(self) -> float:
        return max((c.max_deviation for c in self.checks), default=0.0)

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def summary(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            mode = "exact" if c.exact else f"dev {c.max_deviation:.2e}"
            lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name} ({mode})")
        return "\n".join(lines)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def compare(actual, expected, tol: float = DEFAULT_TOL, name: str = "", details: Optional[dict] = None) -> Check:
    """Entrywise comparison; exact for cyclotomic operands, within ``tol`` otherwise.

    ``details`` receives the flat index of the worst entry on failure.
    """
    details = dict(details or {})
    if isinstance(actual, CycloArray) and isinstance(expected, (CycloArray, int)):
        diff = actual - expected
        bad = ~diff.is_zero()
        dev = float(np.max(np.abs(diff.to_complex()), initial=0.0))
        passed = not bad.any()
        if not passed:
            details.setdefault("first_failure", int(np.flatnonzero(bad.reshape(-1))[0]))
            details.setdefault("failures", int(bad.sum()))
        return Check(name, passed, dev, True, details)
    a = actual.to_complex() if isinstance(actual, CycloArray) else np.asarray(actual)
    b = expected.to_complex() if isinstance(expected, CycloArray) else np.asarray(expected)
    err = np.abs(a - b)
    dev = float(np.max(err, initial=0.0))
    passed = dev <= tol
    if not passed:
        flat = np.atleast_1d(err).reshape(-1)
        details.setdefault("first_failure", int(np.flatnonzero(flat > tol)[0]))
        details.setdefault("failures", int((flat > tol).sum()))
    details.setdefault("tolerance", tol)
    return Check(name, passed, dev, False, details)
