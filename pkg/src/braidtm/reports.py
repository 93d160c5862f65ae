"""Uniform check reports consumed by the CLI and the test suite."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    check: str
    passed: bool
    residual: float = 0.0
    n: int | None = None
    r: int | None = None
    backend: str = "exact"
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "schema": 1,
            "check": self.check,
            "n": self.n,
            "r": self.r,
            "backend": self.backend,
            "residual": self.residual,
            "pass": self.passed,
        }
        if self.details:
            out["details"] = self.details
        return out


def combine(reports) -> bool:
    return all(rep.passed for rep in reports)
