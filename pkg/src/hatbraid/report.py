"""A small record type for residual checks."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

RTOL = 1e-9
ATOL = 1e-12


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tol: float = RTOL
    exact: bool = False
    detail: str = ""

    @property
    def passed(self) -> bool:
        if self.exact:
            return self.residual == 0.0
        return math.isfinite(self.residual) and self.residual <= self.tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        bound = "exact" if self.exact else f"tol={self.tol:.1e}"
        extra = f"  {self.detail}" if self.detail else ""
        return f"[{status}] {self.name}: residual={self.residual:.3e} ({bound}){extra}"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def close(a: complex, b: complex, rtol: float = RTOL, atol: float = ATOL) -> bool:
    return abs(a - b) <= max(atol, rtol * max(abs(a), abs(b)))
