"""Interval vectors, scenarios and scenario classification."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DimensionMismatch, InputError, NotContained, TooManyVertices

DEFAULT_VERTEX_CAP = 20
BOUNDARY_TOL = 1e-9


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class IntervalVector:
    """A box ``[lower, upper]`` of independent real intervals."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = _frozen_array(self.lower)
        up = _frozen_array(self.upper)
        if lo.shape != up.shape:
            raise DimensionMismatch(f"lower has {lo.size} entries, upper has {up.size}")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(up))):
            raise InputError("interval bounds must be finite")
        if np.any(lo > up):
            bad = int(np.argmax(lo > up))
            raise InputError(f"interval {bad} has lower {lo[bad]} > upper {up[bad]}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @classmethod
    def point(cls, values) -> "IntervalVector":
        return cls(values, values)

    @property
    def size(self) -> int:
        return int(self.lower.size)

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalVector):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    def __repr__(self) -> str:
        pairs = ", ".join(f"[{lo:g}, {up:g}]" for lo, up in zip(self.lower, self.upper))
        return f"IntervalVector({pairs})"

    @property
    def center(self) -> np.ndarray:
        return (self.upper + self.lower) / 2

    @property
    def radius(self) -> np.ndarray:
        return (self.upper - self.lower) / 2

    def contains(self, b, tol: float = BOUNDARY_TOL) -> bool:
        b = np.asarray(b, dtype=float)
        return b.shape == self.lower.shape and bool(
            np.all(b >= self.lower - tol) and np.all(b <= self.upper + tol)
        )

    def contains_zero(self) -> bool:
        return bool(np.all(self.lower <= 0) and np.all(self.upper >= 0))

    def clip(self, b) -> np.ndarray:
        return np.clip(np.asarray(b, dtype=float), self.lower, self.upper)


class ScenarioClass(enum.Enum):
    MIDDLE = "middle"
    WEAKLY_EXTREMAL = "weakly_extremal"
    STRONGLY_EXTREMAL = "strongly_extremal"

    @property
    def is_extremal(self) -> bool:
        return self is not ScenarioClass.MIDDLE


def midpoint_radius(iv: IntervalVector) -> tuple[np.ndarray, np.ndarray]:
    return iv.center, iv.radius


def classify_scenario(b, iv: IntervalVector, tol: float = BOUNDARY_TOL) -> ScenarioClass:
    """Classify ``b`` as a middle, weakly extremal or strongly extremal scenario.

    A component counts as "at a bound" when it lies within ``tol`` of either
    endpoint; degenerate components (lower == upper) are always at a bound.
    """
    b = np.asarray(b, dtype=float).reshape(-1)
    if b.shape != iv.lower.shape:
        raise DimensionMismatch(f"scenario has {b.size} entries, interval vector has {iv.size}")
    outside = (b < iv.lower - tol) | (b > iv.upper + tol)
    if np.any(outside):
        i = int(np.argmax(outside))
        raise NotContained(f"component {i}: {b[i]} not in [{iv.lower[i]}, {iv.upper[i]}]")
    at_bound = (np.abs(b - iv.lower) <= tol) | (np.abs(b - iv.upper) <= tol)
    if np.all(at_bound):
        return ScenarioClass.STRONGLY_EXTREMAL
    if np.any(at_bound):
        return ScenarioClass.WEAKLY_EXTREMAL
    return ScenarioClass.MIDDLE


def vertex_scenarios(iv: IntervalVector, cap: int = DEFAULT_VERTEX_CAP) -> Iterator[np.ndarray]:
    """Yield all ``2**m`` vertices of the box in lexicographic bound-choice order.

    Component ``i`` takes its lower bound before its upper bound, with the
    first component varying slowest.
    """
    if iv.size > cap:
        raise TooManyVertices(f"m={iv.size} exceeds the vertex enumeration cap {cap}")
    choices = list(zip(iv.lower, iv.upper))
    for combo in itertools.product(*choices):
        yield np.array(combo, dtype=float)


def sample_scenario(iv: IntervalVector, rng_seed) -> np.ndarray:
    """Draw one scenario uniformly from the box.

    ``rng_seed`` may be an integer seed or an existing ``numpy`` Generator.
    """
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    return rng.uniform(iv.lower, iv.upper)
