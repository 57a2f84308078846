"""Super-set bounds from a McCormick relaxation of the strong-duality system.

The optimal set is the x-projection of

    A x <= b, x >= 0, A^T y <= c, y <= 0, c@x = b@y, b in [b_lower, b_upper].

The bilinear term ``b@y`` is replaced by its McCormick envelope over the
box ``[b_lower, b_upper] x [y_lower, y_upper]``, where the y-box encloses
every optimal dual vector of every scenario.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DualBoxUnbounded, DualInfeasible, SupersetUnavailable
from .estimate import Direction, Method, OutcomeRangeEstimate, Target
from .exact import optimal_value_range
from .lp import DEFAULT_SOLVER, IlpInstance, LpSolver, LpStatus

ROW_NAMES = ("over_lower_y", "over_upper_y", "under_upper_y", "under_lower_y")


@dataclass(frozen=True, eq=False)
class DualBox:
    """Componentwise enclosure ``[lower, upper]`` of optimal duals (all ``<= 0``).

    ``lower`` may hold ``-inf`` where no finite enclosure exists.
    """

    lower: np.ndarray
    upper: np.ndarray

    @property
    def bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)))

    def contains(self, y, tol: float = 1e-7) -> bool:
        y = np.asarray(y, dtype=float)
        return bool(np.all(y >= self.lower - tol) and np.all(y <= self.upper + tol))


def dual_box(inst: IlpInstance, allow_unbounded: bool = False,
             solver: Optional[LpSolver] = None) -> DualBox:
    """Enclose the optimal duals by ``2m`` LPs over the duality-restricted dual polyhedron.

    Any optimal dual ``y*`` of a scenario ``b`` satisfies ``b@y* = z(b)`` and
    ``y* <= 0``, hence ``b_lower@y* >= z_lower`` and ``b_upper@y* <= z_upper``.
    """
    solver = solver or DEFAULT_SOLVER
    vr = optimal_value_range(inst, solver=solver)
    if not np.isfinite(vr.z_lower):
        raise SupersetUnavailable(f"z_lower is {vr.lower_status.value}; the optimal set is empty "
                                  "or the LPs are unbounded")
    m = inst.m
    # substitute u = -y >= 0 so every LP stays in  min c@u, G u <= h, u >= 0  form
    rows = [-inst.A.T, inst.b.lower[None, :]]
    rhs = [inst.c, np.array([-vr.z_lower])]
    if np.isfinite(vr.z_upper):
        rows.append(-inst.b.upper[None, :])
        rhs.append(np.array([vr.z_upper]))
    G = np.vstack(rows)
    h = np.concatenate(rhs)
    lower = np.empty(m)
    upper = np.empty(m)
    for i in range(m):
        e = np.zeros(m)
        e[i] = 1.0
        lo_u = solver.solve(G, h, e)
        if lo_u.status is LpStatus.INFEASIBLE:
            raise DualInfeasible("no dual vector satisfies the duality restrictions")
        upper[i] = -lo_u.objective
        hi_u = solver.solve(G, h, -e)
        if hi_u.status is LpStatus.UNBOUNDED:
            if not allow_unbounded:
                raise DualBoxUnbounded(f"dual coordinate {i} is unbounded below")
            lower[i] = -np.inf
        else:
            lower[i] = hi_u.objective
    return DualBox(lower, upper)


@dataclass(frozen=True, eq=False)
class RelaxationModel:
    """Linear relaxation over the stacked variables ``v = (x, y, b)``.

    Constraints are ``G v <= h`` plus the variable bounds ``lo <= v <= hi``.
    McCormick rows that need an infinite dual bound are omitted.
    """

    G: np.ndarray
    h: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    objective: np.ndarray
    n: int
    m: int
    mccormick_rows: tuple

    @property
    def n_variables(self) -> int:
        return self.n + 2 * self.m

    def split(self, v):
        v = np.asarray(v, dtype=float)
        n, m = self.n, self.m
        return v[:n], v[n:n + m], v[n + m:]

    def stack(self, x, y, b) -> np.ndarray:
        return np.concatenate([np.asarray(x, float), np.asarray(y, float), np.asarray(b, float)])

    def max_violation(self, x, y, b) -> float:
        v = self.stack(x, y, b)
        viol = [np.max(self.G @ v - self.h, initial=0.0),
                np.max(self.lo - v, initial=0.0),
                np.max(v - self.hi, initial=0.0)]
        return float(max(viol))

    def is_feasible(self, x, y, b, tol: float = 1e-7) -> bool:
        return self.max_violation(x, y, b) <= tol

    def optimise(self, sense: str, solver: Optional[LpSolver] = None):
        """Return ``(value, v)`` for min/max of the outcome over the model."""
        solver = solver or DEFAULT_SOLVER
        # shift to w = v - lo for x, b (lo finite) and w = hi - v for y (hi finite)
        n, m = self.n, self.m
        flip = np.zeros(self.n_variables, dtype=bool)
        flip[n:n + m] = True
        anchor = np.where(flip, self.hi, self.lo)
        D = np.where(flip, -1.0, 1.0)
        Gw = self.G * D
        hw = self.h - self.G @ anchor
        span = self.hi - self.lo
        boxed = np.flatnonzero(np.isfinite(span) & ~flip)
        boxed_y = np.flatnonzero(np.isfinite(span) & flip)
        extra = [np.eye(self.n_variables)[j] for j in np.concatenate([boxed, boxed_y])]
        if extra:
            Gw = np.vstack([Gw, np.array(extra)])
            hw = np.concatenate([hw, span[np.concatenate([boxed, boxed_y])]])
        sign = 1.0 if sense == "min" else -1.0
        sol = solver.solve(Gw, hw, sign * self.objective * D)
        if sol.status is LpStatus.UNBOUNDED:
            return (-np.inf if sense == "min" else np.inf), None
        if sol.status is LpStatus.INFEASIBLE:
            return (np.inf if sense == "min" else -np.inf), None
        v = anchor + D * sol.x
        return float(self.objective @ v), v


def build_relaxation(inst: IlpInstance, r, box: DualBox) -> RelaxationModel:
    A, c = inst.A, inst.c
    m, n = A.shape
    bl, bu = inst.b.lower, inst.b.upper
    yl, yu = np.asarray(box.lower, float), np.asarray(box.upper, float)
    zero_x = np.zeros(n)
    rows, rhs = [], []
    # A x - b <= 0
    rows.append(np.hstack([A, np.zeros((m, m)), -np.eye(m)]))
    rhs.append(np.zeros(m))
    # A^T y <= c
    rows.append(np.hstack([np.zeros((n, n)), A.T, np.zeros((n, m))]))
    rhs.append(c)
    names = []
    lower_finite = bool(np.all(np.isfinite(yl)))
    if lower_finite:
        # c@x <= yl@b + bu@y - bu@yl
        rows.append(np.concatenate([c, -bu, -yl])[None, :])
        rhs.append(np.array([-bu @ yl]))
        names.append(ROW_NAMES[0])
    # c@x <= yu@b + bl@y - bl@yu
    rows.append(np.concatenate([c, -bl, -yu])[None, :])
    rhs.append(np.array([-bl @ yu]))
    names.append(ROW_NAMES[1])
    # c@x >= yu@b + bu@y - bu@yu
    rows.append(np.concatenate([-c, bu, yu])[None, :])
    rhs.append(np.array([bu @ yu]))
    names.append(ROW_NAMES[2])
    if lower_finite:
        # c@x >= yl@b + bl@y - bl@yl
        rows.append(np.concatenate([-c, bl, yl])[None, :])
        rhs.append(np.array([bl @ yl]))
        names.append(ROW_NAMES[3])
    lo = np.concatenate([zero_x, yl, bl])
    hi = np.concatenate([np.full(n, np.inf), np.minimum(yu, 0.0), bu])
    objective = np.concatenate([np.asarray(r, float), np.zeros(2 * m)])
    return RelaxationModel(np.vstack(rows), np.concatenate(rhs), lo, hi, objective, n, m,
                           tuple(names))


def solve_superset(inst: IlpInstance, r, solver: Optional[LpSolver] = None,
                   box: Optional[DualBox] = None):
    """Return ``(f_lower^L, f_upper^U)``: outer bounds on the outcome range."""
    start = time.perf_counter()
    if box is None:
        box = dual_box(inst, allow_unbounded=True, solver=solver)
    model = build_relaxation(inst, r, box)
    out = []
    for target in (Target.F_LOWER, Target.F_UPPER):
        value, v = model.optimise(target.sense, solver=solver)
        witness = None if v is None else model.split(v)[2]
        direction = Direction.LOWER_BOUND if target is Target.F_LOWER else Direction.UPPER_BOUND
        out.append(OutcomeRangeEstimate(target, direction, value, Method.SUPERSET, witness,
                                        info={"mccormick_rows": model.mccormick_rows}))
    elapsed = time.perf_counter() - start
    for est in out:
        est.elapsed = elapsed
    return out[0], out[1]
