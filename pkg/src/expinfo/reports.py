"""Pass/fail reports emitted by the certificate checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of a numerical certificate.

    Every slack is signed so that a nonnegative value means the checked
    inequality holds; ``passed`` is ``worst_slack >= -tol``. Composite checks
    keep their sub-reports in ``parts``.
    """

    check: str
    passed: bool
    worst_slack: float
    per_vertex: tuple[float, ...] = ()
    tol: float = 0.0
    parts: tuple["CertificateReport", ...] = field(default=())

    @classmethod
    def from_slacks(cls, check: str, slacks: Sequence[float], tol: float) -> "CertificateReport":
        slacks = tuple(float(s) for s in slacks)
        worst = min(slacks) if slacks else math.inf
        return cls(check, bool(worst >= -tol), worst, slacks, tol)

    @classmethod
    def combine(cls, check: str, parts: Sequence["CertificateReport"]) -> "CertificateReport":
        parts = tuple(parts)
        worst = min(p.worst_slack for p in parts)
        return cls(check, all(p.passed for p in parts), worst, (), max(p.tol for p in parts), parts)

    def part(self, check: str) -> "CertificateReport":
        for p in self.parts:
            if p.check == check:
                return p
        raise KeyError(check)

    def to_json(self) -> dict:
        out = {"check": self.check, "pass": self.passed, "worst_slack": self.worst_slack,
               "per_vertex": list(self.per_vertex), "tol": self.tol}
        if self.parts:
            out["parts"] = [p.to_json() for p in self.parts]
        return out

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.check}: {status} (worst slack {self.worst_slack:.3e}, tol {self.tol:g})"
