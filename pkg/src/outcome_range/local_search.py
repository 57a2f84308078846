"""Scenario-space local search with plus/minus neighbourhoods and shaking.

The search walks over right-hand-side scenarios.  A scenario is scored by
optimising the outcome over the optimal face of its LP, so every value it
reports is attained by some member of the optimal set: for ``min`` the
result is an upper bound on ``f_lower``; for ``max`` a lower bound on
``f_upper``.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyPerturbationSet, InitialInfeasible, InputError
from .estimate import Method, OutcomeRangeEstimate, Target, inner_direction
from .intervals import IntervalVector, sample_scenario
from .lp import IlpInstance, LpSolver, LpStatus, outcome_over_optimal_face, solve_lp

logger = logging.getLogger(__name__)

DEFAULT_Q = (0.1, 0.25, 0.5, 0.75, 1.0)
DEFAULT_V = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.5, 1.0)
INITIAL_RETRIES = 16


@dataclass(frozen=True)
class SearchParams:
    Q: tuple = DEFAULT_Q
    V: tuple = DEFAULT_V
    max_shakes: int = 1
    threshold: float = 0.001
    rng_seed: int = 0
    partitions: Optional[tuple] = None
    """Optional explicit index groups replacing the h-driven choice of P.

    Each entry of ``partitions`` is a sequence of disjoint index sets; the
    search treats every group as one stage, in place of one value of h.
    """

    def __post_init__(self):
        Q = tuple(float(k) for k in self.Q)
        V = tuple(float(h) for h in self.V)
        if not Q or not V:
            raise InputError("Q and V must be nonempty")
        for name, seq in (("Q", Q), ("V", V)):
            if any(not (0.0 < v <= 1.0) for v in seq):
                raise InputError(f"entries of {name} must lie in (0, 1]")
        if self.max_shakes < 0:
            raise InputError("max_shakes must be >= 0")
        if not self.threshold > 0:
            raise InputError("threshold must be > 0")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "V", V)
        if self.partitions is not None:
            parts = tuple(tuple(tuple(int(i) for i in P) for P in group) for group in self.partitions)
            if not parts or any(not group or any(not P for P in group) for group in parts):
                raise InputError("partitions must be nonempty groups of nonempty index sets")
            object.__setattr__(self, "partitions", parts)


@dataclass(frozen=True)
class NeighborhoodMove:
    base: np.ndarray
    k: float
    P: tuple
    direction: str
    box: IntervalVector
    h: Optional[float] = None

    def __post_init__(self):
        if self.direction not in ("plus", "minus"):
            raise InputError(f"direction must be 'plus' or 'minus', got {self.direction!r}")


def subset_size(h: float, m: int) -> int:
    return max(1, math.floor(h * m))


def apply_move(mv: NeighborhoodMove) -> np.ndarray:
    """Perturb the components in ``P`` by a fraction ``k`` of their slack to the bound."""
    if not mv.P:
        raise EmptyPerturbationSet("the perturbation set P is empty")
    b = np.array(mv.base, dtype=float)
    idx = np.fromiter(mv.P, dtype=int)
    if mv.direction == "plus":
        b[idx] += mv.k * (mv.box.upper[idx] - b[idx])
    else:
        b[idx] -= mv.k * (b[idx] - mv.box.lower[idx])
    return mv.box.clip(b)


@dataclass
class _Trace:
    values: list = field(default_factory=list)
    evaluations: int = 0
    shakes: int = 0


def _score(inst, b, r, sense, solver) -> float:
    lp = solve_lp(inst, b, solver=solver)
    if lp.status is not LpStatus.OPTIMAL:
        return math.inf if sense == "min" else -math.inf
    return outcome_over_optimal_face(inst, b, r, sense, solver=solver, base=lp)


def local_search(inst: IlpInstance, r, sense: str = "min",
                 params: SearchParams = SearchParams(),
                 solver: Optional[LpSolver] = None) -> OutcomeRangeEstimate:
    if sense not in ("min", "max"):
        raise InputError(f"sense must be 'min' or 'max', got {sense!r}")
    start = time.perf_counter()
    target = Target.F_LOWER if sense == "min" else Target.F_UPPER
    sign = 1.0 if sense == "min" else -1.0
    box = inst.b
    m = inst.m
    rng = np.random.default_rng(params.rng_seed)
    trace = _Trace()

    record = [math.inf, None]
    cache: dict = {}

    def evaluate(b) -> float:
        trace.evaluations += 1
        key = b.tobytes()
        if key not in cache:
            cache[key] = sign * _score(inst, b, r, sense, solver)
        value = cache[key]
        # the reported result is the best scenario ever evaluated, including
        # moves whose improvement fell below the acceptance threshold
        if value < record[0]:
            record[0], record[1] = value, np.array(b, dtype=float)
            trace.values.append(sign * value)
        return value

    # initial solution from a random scenario
    for _ in range(INITIAL_RETRIES):
        b = sample_scenario(box, rng)
        best = evaluate(b)
        if math.isfinite(best):
            break
    else:
        raise InitialInfeasible(f"no feasible scenario among {INITIAL_RETRIES} random draws")

    Q = params.Q
    stages = _Stages(params, m, rng)
    q = 0
    k = Q[q]
    u = 0
    while u <= params.max_shakes:
        P = stages.P
        cand = []
        for direction in ("plus", "minus"):
            nb = apply_move(NeighborhoodMove(b, k, P, direction, box))
            cand.append((evaluate(nb), nb))
        f_hat, b_hat = min(cand, key=lambda t: t[0])
        improvement = best - f_hat
        if improvement >= params.threshold:
            best = f_hat
            b = b_hat
            q, k = 0, Q[0]
        elif q < len(Q) - 1:
            q += 1
            k = Q[q]
        elif stages.advance():
            q, k = 0, Q[0]
        else:
            u += 1
            trace.shakes += 1
            q, k = 0, Q[0]
            stages.reset()
            b = sample_scenario(box, rng)

    elapsed = time.perf_counter() - start
    return OutcomeRangeEstimate(
        target=target,
        direction=inner_direction(target),
        value=sign * record[0],
        method=Method.LOCAL_SEARCH,
        witness=record[1],
        elapsed=elapsed,
        info={"trace": trace.values, "evaluations": trace.evaluations, "shakes": trace.shakes},
    )


class _Stages:
    """Walks the (h, P) schedule: disjoint P sets per h, then the next h."""

    def __init__(self, params: SearchParams, m: int, rng: np.random.Generator):
        self.params = params
        self.m = m
        self.rng = rng
        self.reset()

    @property
    def n_stages(self) -> int:
        if self.params.partitions is not None:
            return len(self.params.partitions)
        return len(self.params.V)

    def reset(self):
        self.v = 0
        self._start_stage()

    def _start_stage(self):
        self.o = 1
        self.gamma: set = set()
        if self.params.partitions is not None:
            self.P = self.params.partitions[self.v][0]
        else:
            self.P = self._draw(subset_size(self.params.V[self.v], self.m))
        self.gamma.update(self.P)

    def _draw(self, size: int) -> tuple:
        available = np.array(sorted(set(range(self.m)) - self.gamma), dtype=int)
        if available.size < size:
            return ()
        return tuple(sorted(int(i) for i in self.rng.choice(available, size=size, replace=False)))

    def _max_sets(self) -> int:
        if self.params.partitions is not None:
            return len(self.params.partitions[self.v])
        return max(1, math.floor(1.0 / self.params.V[self.v]))

    def advance(self) -> bool:
        """Move to the next P (or next h); False once every stage is exhausted."""
        if self.v >= self.n_stages - 1:
            return False
        if self.o < self._max_sets():
            if self.params.partitions is not None:
                nxt = self.params.partitions[self.v][self.o]
            else:
                nxt = self._draw(len(self.P))
            if nxt:
                self.o += 1
                self.P = nxt
                self.gamma.update(nxt)
                return True
        self.v += 1
        self._start_stage()
        return True
