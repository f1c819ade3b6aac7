"""Residual reports: named residuals, tolerances, and pass/fail verdicts.

Every factorization and generalized inverse ends by checking its own
defining identities; the result is a :class:`ResidualReport` whose JSON
form is stable: ``{operation, checks: [{name, residual, tolerance, pass}],
pass, seconds}``.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class ResidualReport:
    """Collected residual checks for one operation."""

    operation: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0
    _started: float | None = None

    def start(self) -> "ResidualReport":
        self._started = time.perf_counter()
        return self

    def stop(self) -> "ResidualReport":
        if self._started is not None:
            self.seconds = time.perf_counter() - self._started
        return self

    def add(self, name: str, residual: float, tolerance: float) -> Check:
        residual = float(abs(residual))
        check = Check(name, residual, float(tolerance))
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def residual(self, name: str) -> float:
        for c in self.checks:
            if c.name == name:
                return c.residual
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "operation": self.operation,
            "checks": [c.as_dict() for c in self.checks],
            "pass": self.passed,
            "seconds": self.seconds,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.as_dict(), indent=indent)

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            verdict = "PASS" if c.passed else "FAIL"
            lines.append(
                f"  {c.name}: residual={c.residual:.3e} "
                f"tolerance={c.tolerance:.3e} {verdict}"
            )
        lines.append(f"{self.operation}: {'PASS' if self.passed else 'FAIL'}")
        return lines
