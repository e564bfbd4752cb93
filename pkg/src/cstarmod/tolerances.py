"""Numerical tolerances shared by every check.

All thresholds are relative to ``max(1, scale)`` where ``scale`` is the norm
of the input being tested, unless a check documents otherwise.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-9
    pos: float = 1e-9
    eig: float = 1e-10
    sqrt: float = 1e-10
    norm: float = 1e-9
    zero: float = 1e-12
    sub: float = 1e-8
    op: float = 1e-8
    opnorm: float = 1e-6
    probe: float = 1e-3
    jacobi: float = 1e-13

    def with_overrides(self, overrides: dict[str, float]) -> "Tolerances":
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"unknown tolerance name(s): {', '.join(sorted(unknown))}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


DEFAULT_TOL = Tolerances()


def scaled(tol: float, scale: float) -> float:
    return tol * max(1.0, scale)
