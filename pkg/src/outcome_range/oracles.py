"""Ground-truth style estimators: vertex enumeration and Monte Carlo sampling."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AllSamplesInfeasible, InputError
from .estimate import Direction, Method, OutcomeRangeEstimate, Target, inner_direction
from .intervals import DEFAULT_VERTEX_CAP, vertex_scenarios
from .lp import IlpInstance, LpSolver, LpStatus, outcome_over_optimal_face, solve_lp

FACET_SEED = 20240917


@dataclass
class ScenarioOutcome:
    scenario: np.ndarray
    feasible: bool
    degenerate: bool = False
    f_min: float = np.inf
    f_max: float = -np.inf


def scenario_outcome(inst: IlpInstance, b, r, solver: Optional[LpSolver] = None) -> ScenarioOutcome:
    """Per-scenario outcome range over the optimal face of ``LP(b)``."""
    lp = solve_lp(inst, b, solver=solver)
    if lp.status is LpStatus.INFEASIBLE:
        return ScenarioOutcome(np.asarray(b, float), feasible=False)
    if lp.status is LpStatus.UNBOUNDED:
        raise InputError("LP(b) is unbounded for a scenario; the outcome range is undefined")
    lo = outcome_over_optimal_face(inst, b, r, "min", solver=solver, base=lp)
    hi = outcome_over_optimal_face(inst, b, r, "max", solver=solver, base=lp)
    return ScenarioOutcome(np.asarray(b, float), True, lp.degenerate, lo, hi)


class _Extremes:
    def __init__(self):
        self.lo = np.inf
        self.hi = -np.inf
        self.lo_b = None
        self.hi_b = None
        self.evaluated = 0
        self.feasible = 0

    def add(self, out: ScenarioOutcome):
        self.evaluated += 1
        if not out.feasible:
            return
        self.feasible += 1
        # strict comparisons keep the first witness in enumeration order
        if out.f_min < self.lo:
            self.lo, self.lo_b = out.f_min, out.scenario
        if out.f_max > self.hi:
            self.hi, self.hi_b = out.f_max, out.scenario


def _facet_scenarios(inst: IlpInstance, face_grid: int):
    box = inst.b
    rng = np.random.default_rng(FACET_SEED)
    for i in range(box.size):
        for side in (box.lower[i], box.upper[i]):
            for _ in range(face_grid):
                b = rng.uniform(box.lower, box.upper)
                b[i] = side
                yield b


def vertex_oracle(inst: IlpInstance, r, face_grid: int = 3, cap: int = DEFAULT_VERTEX_CAP,
                  solver: Optional[LpSolver] = None):
    """Enumerate box vertices (plus the zero scenario when it lies in the box).

    Returns ``(f_lower_estimate, f_upper_estimate, exact)``.  ``exact`` holds
    when every vertex LP is feasible and non-degenerate; the estimates are then
    tagged exact, otherwise they are inner bounds and ``face_grid`` random
    scenarios per facet are added as a hedge.
    """
    start = time.perf_counter()
    ext = _Extremes()
    all_feasible = True
    any_degenerate = False
    for b in vertex_scenarios(inst.b, cap=cap):
        out = scenario_outcome(inst, b, r, solver)
        ext.add(out)
        all_feasible &= out.feasible
        any_degenerate |= out.degenerate
    if inst.b.contains_zero():
        ext.add(scenario_outcome(inst, np.zeros(inst.m), r, solver))
    exact = all_feasible and not any_degenerate
    if not exact and face_grid > 0:
        for b in _facet_scenarios(inst, face_grid):
            ext.add(scenario_outcome(inst, b, r, solver))
    if ext.feasible == 0:
        raise AllSamplesInfeasible("every enumerated scenario LP is infeasible")
    elapsed = time.perf_counter() - start
    info = {"exact": exact, "evaluated": ext.evaluated, "all_vertices_feasible": all_feasible,
            "degenerate_vertex": any_degenerate}
    ests = []
    for target, value, wit in ((Target.F_LOWER, ext.lo, ext.lo_b), (Target.F_UPPER, ext.hi, ext.hi_b)):
        direction = Direction.EXACT if exact else inner_direction(target)
        ests.append(OutcomeRangeEstimate(target, direction, value, Method.VERTEX_ORACLE, wit,
                                         elapsed, dict(info)))
    return ests[0], ests[1], exact


def monte_carlo(inst: IlpInstance, r, n_samples: int = 100, rng_seed=0,
                solver: Optional[LpSolver] = None):
    """Empirical outcome range over uniformly sampled scenarios.

    Samples are drawn sequentially from one generator, so a larger
    ``n_samples`` with the same seed evaluates a superset of scenarios.
    """
    if n_samples < 1:
        raise InputError("n_samples must be >= 1")
    start = time.perf_counter()
    rng = np.random.default_rng(rng_seed)
    ext = _Extremes()
    for _ in range(n_samples):
        b = rng.uniform(inst.b.lower, inst.b.upper)
        ext.add(scenario_outcome(inst, b, r, solver))
    if ext.feasible == 0:
        raise AllSamplesInfeasible(f"all {n_samples} sampled scenarios are infeasible")
    elapsed = time.perf_counter() - start
    info = {"samples": n_samples, "feasible": ext.feasible}
    lo = OutcomeRangeEstimate(Target.F_LOWER, Direction.UPPER_BOUND, ext.lo, Method.MONTE_CARLO,
                              ext.lo_b, elapsed, dict(info))
    hi = OutcomeRangeEstimate(Target.F_UPPER, Direction.LOWER_BOUND, ext.hi, Method.MONTE_CARLO,
                              ext.hi_b, elapsed, dict(info))
    return lo, hi
