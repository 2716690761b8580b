"""Report records shared by the verification routines."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

REL_TOL = 1e-9


def _jsonable(x):
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


@dataclass
class BoundReport:
    """An exact (or computed) quantity compared against a bound."""

    quantity_name: str
    exact_value: Any
    bound_value: Any
    holds: Optional[bool] = None
    slack: Any = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.slack is None:
            self.slack = self.bound_value - self.exact_value
        if self.holds is None:
            tol = REL_TOL * max(abs(self.bound_value), 1.0)
            self.holds = self.exact_value <= self.bound_value + tol
        self.holds = bool(self.holds)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


@dataclass
class ThresholdResult:
    """Least r from which a sufficient existence condition holds for good."""

    q: int
    mode: str
    condition: str
    r_min: Optional[int] = None
    lhs_rhs_trace: List[Dict[str, Any]] = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.r_min is not None:
            d["r_min"] = str(self.r_min) if self.r_min >= 2**63 else self.r_min
            d["log10_r_min"] = math.log10(self.r_min)
        return d
