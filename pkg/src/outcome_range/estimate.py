from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import InputError


class Target(enum.Enum):
    F_LOWER = "f_lower"
    F_UPPER = "f_upper"

    @property
    def sense(self) -> str:
        return "min" if self is Target.F_LOWER else "max"


class Direction(enum.Enum):
    EXACT = "exact"
    UPPER_BOUND = "upper_bound"
    LOWER_BOUND = "lower_bound"


class Method(enum.Enum):
    BSTABLE_EXACT = "BStableExact"
    SUPERSET = "Superset"
    LOCAL_SEARCH = "LocalSearch"
    VERTEX_ORACLE = "VertexOracle"
    MONTE_CARLO = "MonteCarlo"


def inner_direction(target: Target) -> Direction:
    """Direction of a value attained by some member of the optimal set."""
    return Direction.UPPER_BOUND if target is Target.F_LOWER else Direction.LOWER_BOUND


@dataclass(eq=False)
class OutcomeRangeEstimate:
    """One endpoint estimate of the outcome range ``[f_lower, f_upper]``."""

    target: Target
    direction: Direction
    value: float
    method: Method
    witness: Optional[np.ndarray] = None
    elapsed: float = 0.0
    info: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.direction is Direction.EXACT and self.method not in (
            Method.BSTABLE_EXACT,
            Method.VERTEX_ORACLE,
        ):
            raise InputError(f"{self.method.value} cannot produce exact estimates")
        self.value = float(self.value)

    def as_dict(self) -> dict:
        return {
            "target": self.target.value,
            "direction": self.direction.value,
            "value": self.value,
            "method": self.method.value,
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "elapsed": self.elapsed,
        }
