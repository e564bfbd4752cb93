"""Small result containers returned by the check operations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    name: str
    passed: bool
    residual: float | None = None
    tolerance: float | None = None
    detail: Any = None

    def to_json(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "passed": bool(self.passed)}
        if self.residual is not None:
            out["residual"] = float(self.residual)
        if self.tolerance is not None:
            out["tolerance"] = float(self.tolerance)
        if self.detail is not None:
            out["detail"] = self.detail
        return out


@dataclass
class CheckReport:
    """Named collection of checks; passes iff every check passes."""

    name: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, residual=None, tolerance=None, detail=None) -> Check:
        c = Check(name, bool(passed), None if residual is None else float(residual),
                  None if tolerance is None else float(tolerance), detail)
        self.checks.append(c)
        return c

    def bound(self, name: str, residual: float, tolerance: float, detail=None) -> Check:
        """Record ``residual <= tolerance``."""
        return self.add(name, residual <= tolerance, residual, tolerance, detail)

    def extend(self, other: "CheckReport", prefix: str = "") -> "CheckReport":
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.residual, c.tolerance, c.detail))
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self) -> bool:
        return self.passed

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checks": [c.to_json() for c in self.checks]}
