"""Polynomially solvable cases: unique B-stability, the value range and the cone check."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InfeasibleOmegaB, NumericalFailure
from .estimate import Direction, Method, OutcomeRangeEstimate, Target
from .lp import (
    DEFAULT_SOLVER,
    DEFAULT_TOL,
    Basis,
    IlpInstance,
    LpSolver,
    LpStatus,
    Tolerances,
    solve_lp,
)


@dataclass(frozen=True)
class ValueRange:
    """Range of the optimal value over all scenarios.

    Following ``min(empty) = inf``, an infeasible endpoint LP is reported as
    ``+inf`` and an unbounded one as ``-inf``; the statuses keep the reason.
    """

    z_lower: float
    z_upper: float
    lower_status: LpStatus
    upper_status: LpStatus

    @property
    def finite(self) -> bool:
        return np.isfinite(self.z_lower) and np.isfinite(self.z_upper)


def _status_value(sol) -> float:
    if sol.status is LpStatus.OPTIMAL:
        return sol.objective
    return np.inf if sol.status is LpStatus.INFEASIBLE else -np.inf


def optimal_value_range(inst: IlpInstance, solver: Optional[LpSolver] = None) -> ValueRange:
    # widest feasible set gives the best value, narrowest the worst
    low = solve_lp(inst, inst.b.upper, solver=solver)
    up = solve_lp(inst, inst.b.lower, solver=solver)
    return ValueRange(_status_value(low), _status_value(up), low.status, up.status)


def check_unique_bstable(inst: IlpInstance, solver: Optional[LpSolver] = None,
                         tol: Tolerances = DEFAULT_TOL) -> Optional[Basis]:
    """Certify unique B-stability from the optimal basis of ``LP(b_c)``.

    Returns the basis when both the strict dual condition and the interval
    primal condition ``A_B^-1 b_c - |A_B^-1| b_delta >= 0`` hold, else ``None``.
    """
    sol = solve_lp(inst, inst.b.center, solver=solver)
    if sol.status is not LpStatus.OPTIMAL:
        return None
    sf = inst.standard_form()
    basis = sol.basis
    Binv = sf.basis_inverse(basis)
    _, rc = sf.reduced_costs(sf.c_tilde, basis)
    if not np.all(rc > tol.strict):
        return None
    worst = Binv @ inst.b.center - np.abs(Binv) @ inst.b.radius
    if np.any(worst < -tol.feasibility):
        return None
    return basis


def lemma_polyhedron(inst: IlpInstance, basis: Basis):
    """Inequality data ``(G, h)`` over ``x~_B >= 0`` describing the optimal set."""
    AB = inst.standard_form().A_tilde[:, list(basis.indices)]
    G = np.vstack([AB, -AB])
    h = np.concatenate([inst.b.upper, -inst.b.lower])
    return G, h


def solve_orp_bstable(inst: IlpInstance, r, basis: Basis,
                      solver: Optional[LpSolver] = None):
    """Exact ``(f_lower, f_upper)`` for a unique B-stable instance."""
    solver = solver or DEFAULT_SOLVER
    start = time.perf_counter()
    sf = inst.standard_form(r)
    idx = list(basis.indices)
    G, h = lemma_polyhedron(inst, basis)
    rB = sf.r_tilde[idx]
    results = []
    for target, sign in ((Target.F_LOWER, 1.0), (Target.F_UPPER, -1.0)):
        sol = solver.solve(G, h, sign * rB)
        if sol.status is LpStatus.INFEASIBLE:
            raise InfeasibleOmegaB("the optimal-set polyhedron of the certified basis is empty")
        if sol.status is LpStatus.UNBOUNDED:
            raise NumericalFailure("optimal-set polyhedron is unbounded in the outcome direction")
        xB = sol.x
        witness = inst.b.clip(sf.A_tilde[:, idx] @ xB)
        xt = np.zeros(sf.width)
        xt[idx] = xB
        results.append(OutcomeRangeEstimate(
            target=target,
            direction=Direction.EXACT,
            value=float(rB @ xB),
            method=Method.BSTABLE_EXACT,
            witness=witness,
            info={"x": xt[: inst.n]},
        ))
    elapsed = time.perf_counter() - start
    for est in results:
        est.elapsed = elapsed
    return results[0], results[1]


def cone_sufficient_check(inst: IlpInstance, r, basis: Basis,
                          tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when ``r`` lies in the optimality cone of ``basis``."""
    sf = inst.standard_form(r)
    _, rc = sf.reduced_costs(sf.r_tilde, basis)
    return bool(np.all(rc >= -tol.optimality))


def cone_outcome_range(inst: IlpInstance, r, solver: Optional[LpSolver] = None):
    """``(f_lower, f_upper)`` as the two ``r``-optimal values at ``b_upper`` and ``b_lower``.

    Only meaningful after :func:`cone_sufficient_check` succeeded.
    """
    lo = solve_lp(inst, inst.b.upper, r, solver=solver)
    hi = solve_lp(inst, inst.b.lower, r, solver=solver)
    return _status_value(lo), _status_value(hi)
