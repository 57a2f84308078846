"""Dense revised simplex for ``min c@x  s.t.  A@x <= b, x >= 0``.

Every LP in the package is brought into this inequality form.  The solver
works on the standard form ``[A | I] x~ = b`` and returns the optimal basis,
reduced costs and dual multipliers explicitly, since the exact and the
scenario-based methods all reason about bases.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

import numpy as np

from .errors import DimensionMismatch, InputError, NumericalFailure, SingularBasis
from .intervals import IntervalVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tolerances:
    feasibility: float = 1e-9
    optimality: float = 1e-9
    strict: float = 1e-7
    face_rel: float = 1e-7
    pivot: float = 1e-9

    def face_tol(self, z: float) -> float:
        return self.face_rel * max(1.0, abs(z))


DEFAULT_TOL = Tolerances()


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class BasisCheck(enum.Enum):
    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "primal_infeasible"
    DUAL_INFEASIBLE = "dual_infeasible"


@dataclass(frozen=True, eq=False)
class IlpInstance:
    """``min c@x s.t. A@x <= b, x >= 0`` with ``b`` ranging over an interval vector."""

    A: np.ndarray
    c: np.ndarray
    b: IntervalVector
    name: Optional[str] = None

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        c = np.array(self.c, dtype=float).reshape(-1)
        if A.ndim != 2:
            raise DimensionMismatch("A must be a 2-d matrix")
        m, n = A.shape
        if c.size != n:
            raise DimensionMismatch(f"c has {c.size} entries, A has {n} columns")
        if self.b.size != m:
            raise DimensionMismatch(f"b has {self.b.size} entries, A has {m} rows")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(c))):
            raise InputError("A and c must be finite")
        A.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", c)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def standard_form(self, r=None) -> "StandardForm":
        return StandardForm.from_inequalities(self.A, self.c, r)

    def with_bounds(self, lower, upper) -> "IlpInstance":
        return IlpInstance(self.A, self.c, IntervalVector(lower, upper), self.name)


@dataclass(frozen=True)
class Basis:
    """Ordered basic column indices (0-based) into ``[A | I]``."""

    indices: tuple

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if len(set(self.indices)) != len(self.indices):
            raise InputError(f"basis has repeated indices: {self.indices}")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def nonbasic(self, total: int) -> list[int]:
        basic = set(self.indices)
        return [j for j in range(total) if j not in basic]


@dataclass(frozen=True, eq=False)
class StandardForm:
    A_tilde: np.ndarray
    c_tilde: np.ndarray
    r_tilde: Optional[np.ndarray]
    slack_offset: int

    @classmethod
    def from_inequalities(cls, A, c, r=None) -> "StandardForm":
        A = np.asarray(A, dtype=float)
        m, n = A.shape
        A_tilde = np.hstack([A, np.eye(m)])
        c_tilde = np.concatenate([np.asarray(c, dtype=float), np.zeros(m)])
        r_tilde = None if r is None else np.concatenate([np.asarray(r, dtype=float), np.zeros(m)])
        return cls(A_tilde, c_tilde, r_tilde, n)

    @property
    def m(self) -> int:
        return self.A_tilde.shape[0]

    @property
    def width(self) -> int:
        return self.A_tilde.shape[1]

    def basis_inverse(self, basis: Basis) -> np.ndarray:
        if len(basis) != self.m or any(j < 0 or j >= self.width for j in basis):
            raise SingularBasis(f"basis {basis.indices} does not index {self.m} columns of A~")
        AB = self.A_tilde[:, list(basis.indices)]
        if np.linalg.matrix_rank(AB) < self.m:
            raise SingularBasis(f"columns {basis.indices} are linearly dependent")
        return np.linalg.inv(AB)

    def reduced_costs(self, cost: np.ndarray, basis: Basis) -> tuple[list[int], np.ndarray]:
        """Return nonbasic indices and ``cost_N - cost_B A_B^{-1} A_N``."""
        Binv = self.basis_inverse(basis)
        N = basis.nonbasic(self.width)
        y = cost[list(basis.indices)] @ Binv
        return N, cost[N] - y @ self.A_tilde[:, N]


@dataclass(eq=False)
class LpSolution:
    status: LpStatus
    x: Optional[np.ndarray] = None
    slack: Optional[np.ndarray] = None
    objective: Optional[float] = None
    basis: Optional[Basis] = None
    reduced_costs: Optional[np.ndarray] = None
    duals: Optional[np.ndarray] = None
    degenerate: bool = False
    unique_basis: bool = False
    iterations: int = 0
    tableau_values: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL

    def nonbasic_reduced_costs(self) -> np.ndarray:
        """Reduced costs restricted to the nonbasic columns of ``[A | I]``."""
        if self.reduced_costs is None or self.basis is None:
            return np.empty(0)
        mask = np.ones(self.reduced_costs.size, dtype=bool)
        mask[list(self.basis.indices)] = False
        return self.reduced_costs[mask]


class LpSolver(Protocol):
    """Anything that solves ``min c@x s.t. A@x <= b, x >= 0`` with basis output."""

    def solve(self, A, b, c, warm_basis: Optional[Sequence[int]] = None) -> LpSolution: ...


class _Phase:
    """Primal simplex iterations on ``M x = rhs, x >= 0`` from a feasible basis."""

    REFACTOR_EVERY = 32
    STALL_LIMIT = 50

    def __init__(self, M, rhs, basis, tol: Tolerances, max_iter: int):
        self.M = M
        self.rhs = rhs
        self.basis = list(basis)
        self.tol = tol
        self.max_iter = max_iter
        self.iterations = 0
        self.refactor()

    def refactor(self):
        B = self.M[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure("basis matrix became singular") from exc
        self.xB = self.Binv @ self.rhs
        self.since_refactor = 0

    def pivot(self, leave_pos: int, enter: int, d: np.ndarray, theta: float):
        self.xB -= theta * d
        self.xB[leave_pos] = theta
        prow = self.Binv[leave_pos] / d[leave_pos]
        self.Binv -= np.outer(d, prow)
        self.Binv[leave_pos] = prow
        self.basis[leave_pos] = enter
        self.iterations += 1
        self.since_refactor += 1
        if self.since_refactor >= self.REFACTOR_EVERY:
            self.refactor()

    def run(self, cost, allowed: np.ndarray) -> LpStatus:
        """Minimise ``cost`` over columns flagged in ``allowed``."""
        tol = self.tol
        bland = False
        stall = 0
        verified = False
        while True:
            if self.iterations >= self.max_iter:
                raise NumericalFailure(f"simplex exceeded {self.max_iter} iterations")
            y = cost[self.basis] @ self.Binv
            rc = cost - y @ self.M
            rc[self.basis] = 0.0
            candidates = np.flatnonzero(allowed & (rc < -tol.optimality))
            if candidates.size == 0:
                if verified or self.since_refactor == 0:
                    return LpStatus.OPTIMAL
                # confirm optimality on a fresh factorisation before stopping
                self.refactor()
                verified = True
                continue
            verified = False
            if bland:
                enter = int(candidates[0])
            else:
                enter = int(candidates[np.argmin(rc[candidates])])
            d = self.Binv @ self.M[:, enter]
            positive = d > tol.pivot * max(1.0, np.abs(d).max())
            if not np.any(positive):
                return LpStatus.UNBOUNDED
            xB = np.maximum(self.xB, 0.0)
            ratios = np.full(d.size, np.inf)
            ratios[positive] = xB[positive] / d[positive]
            theta = ratios.min()
            ties = np.flatnonzero(ratios <= theta + tol.feasibility)
            if bland:
                leave_pos = int(min(ties, key=lambda p: self.basis[p]))
            else:
                leave_pos = int(ties[np.argmax(d[ties])])
            theta = ratios[leave_pos]
            if theta <= tol.feasibility:
                stall += 1
                if stall > self.STALL_LIMIT and not bland:
                    logger.debug("switching to Bland's rule after %d degenerate pivots", stall)
                    bland = True
            else:
                stall = 0
            self.pivot(leave_pos, enter, d, theta)


class SimplexSolver:
    """Bundled two-phase revised simplex."""

    def __init__(self, tol: Tolerances = DEFAULT_TOL, iteration_factor: int = 50):
        self.tol = tol
        self.iteration_factor = iteration_factor

    def solve(self, A, b, c, warm_basis: Optional[Sequence[int]] = None) -> LpSolution:
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float).reshape(-1)
        c = np.asarray(c, dtype=float).reshape(-1)
        m, n = A.shape
        if b.size != m or c.size != n:
            raise DimensionMismatch(f"A is {m}x{n} but b has {b.size} and c has {c.size} entries")
        tol = self.tol
        max_iter = self.iteration_factor * (m + n)
        At = np.hstack([A, np.eye(m)])
        ct = np.concatenate([c, np.zeros(m)])
        width = n + m
        if m == 0:
            if np.any(c < -tol.optimality):
                return LpSolution(LpStatus.UNBOUNDED)
            return self._finish(At, b, ct, n, [], 0)

        phase = None
        if warm_basis is not None and len(warm_basis) == m:
            try:
                candidate = _Phase(At, b, warm_basis, tol, max_iter)
            except NumericalFailure:
                candidate = None
            if candidate is not None and np.all(candidate.xB >= -tol.feasibility):
                phase = candidate

        if phase is None:
            negative = np.flatnonzero(b < 0)
            k = negative.size
            if k == 0:
                phase = _Phase(At, b, range(n, n + m), tol, max_iter)
            else:
                art = np.zeros((m, k))
                art[negative, np.arange(k)] = -1.0
                M = np.hstack([At, art])
                start = [n + i for i in range(m)]
                for j, i in enumerate(negative):
                    start[i] = width + j
                phase = _Phase(M, b, start, tol, max_iter)
                cost1 = np.concatenate([np.zeros(width), np.ones(k)])
                phase.run(cost1, np.ones(width + k, dtype=bool))
                phase.refactor()
                infeas = float(np.sum(phase.xB[np.array(phase.basis) >= width]))
                if infeas > tol.feasibility * max(1.0, np.abs(b).max()):
                    return LpSolution(LpStatus.INFEASIBLE, iterations=phase.iterations)
                self._drive_out_artificials(phase, width)
                phase.M = At
                phase.refactor()

        allowed = np.ones(width, dtype=bool)
        status = phase.run(ct, allowed)
        if status is LpStatus.UNBOUNDED:
            return LpSolution(LpStatus.UNBOUNDED, iterations=phase.iterations)
        return self._finish(At, b, ct, n, phase.basis, phase.iterations)

    def solve_on_face(self, A, b, objective, base: LpSolution) -> LpSolution:
        """Minimise ``objective`` over the optimal solution set described by ``base``.

        By complementary slackness with the duals of ``base``, the optimal set
        is ``{x~ >= 0 : [A | I] x~ = b, x~_j = 0 where reduced cost_j > 0}``;
        the search starts from the optimal basis, which is feasible for it.
        """
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float).reshape(-1)
        m, n = A.shape
        At = np.hstack([A, np.eye(m)])
        ct = np.concatenate([np.asarray(objective, dtype=float).reshape(-1), np.zeros(m)])
        scale = max(1.0, float(np.abs(base.duals).max(initial=0.0)))
        allowed = base.reduced_costs <= self.tol.optimality * scale
        allowed[list(base.basis.indices)] = True
        phase = _Phase(At, b, base.basis.indices, self.tol, self.iteration_factor * (m + n))
        status = phase.run(ct, allowed)
        if status is LpStatus.UNBOUNDED:
            return LpSolution(LpStatus.UNBOUNDED, iterations=phase.iterations)
        xB = np.linalg.solve(At[:, phase.basis], b)
        xt = np.zeros(n + m)
        xt[phase.basis] = np.maximum(xB, 0.0)
        return LpSolution(LpStatus.OPTIMAL, x=xt[:n], slack=xt[n:], objective=float(ct @ xt),
                          basis=Basis(phase.basis), iterations=phase.iterations,
                          degenerate=bool(np.any(xB <= self.tol.feasibility)))

    def _drive_out_artificials(self, phase: _Phase, width: int):
        for pos in range(len(phase.basis)):
            if phase.basis[pos] < width:
                continue
            row = phase.Binv[pos] @ phase.M[:, :width]
            row[[j for j in phase.basis if j < width]] = 0.0
            enter = int(np.argmax(np.abs(row)))
            if abs(row[enter]) <= self.tol.pivot:
                raise NumericalFailure("cannot pivot an artificial variable out of the basis")
            d = phase.Binv @ phase.M[:, enter]
            phase.pivot(pos, enter, d, phase.xB[pos] / d[pos])
        phase.refactor()

    def _finish(self, At, b, ct, n, basis, iterations) -> LpSolution:
        tol = self.tol
        m = At.shape[0]
        width = At.shape[1]
        if m:
            AB = At[:, basis]
            xB = np.linalg.solve(AB, b)
            y = np.linalg.solve(AB.T, ct[basis])
        else:
            xB = np.empty(0)
            y = np.empty(0)
        xt = np.zeros(width)
        xt[basis] = xB
        if np.any(xB < -tol.feasibility * max(1.0, np.abs(b).max(initial=0.0))):
            raise NumericalFailure(f"final basis is primal infeasible (min value {xB.min():.3e})")
        xt = np.maximum(xt, 0.0)
        rc = ct - y @ At
        rc[basis] = 0.0
        nonbasic = np.ones(width, dtype=bool)
        nonbasic[basis] = False
        rc_n = rc[nonbasic]
        if np.any(rc_n < -10 * tol.optimality * max(1.0, np.abs(ct).max(initial=0.0))):
            raise NumericalFailure("final basis is not dual feasible")
        return LpSolution(
            status=LpStatus.OPTIMAL,
            x=xt[:n],
            slack=xt[n:],
            objective=float(ct @ xt),
            basis=Basis(basis),
            reduced_costs=rc,
            duals=y,
            degenerate=bool(np.any(xB <= tol.feasibility)),
            unique_basis=bool(np.all(rc_n > tol.strict)),
            iterations=iterations,
            tableau_values=xB,
        )


DEFAULT_SOLVER = SimplexSolver()


def solve_lp(inst: IlpInstance, b, objective=None, solver: Optional[LpSolver] = None,
             warm_basis=None) -> LpSolution:
    """Solve ``LP(b)`` of the instance, optionally with a different objective."""
    b = np.asarray(b, dtype=float).reshape(-1)
    if b.size != inst.m:
        raise DimensionMismatch(f"scenario has {b.size} entries, instance has m={inst.m}")
    obj = inst.c if objective is None else np.asarray(objective, dtype=float).reshape(-1)
    if obj.size != inst.n:
        raise DimensionMismatch(f"objective has {obj.size} entries, instance has n={inst.n}")
    return (solver or DEFAULT_SOLVER).solve(inst.A, b, obj, warm_basis=warm_basis)


def outcome_over_optimal_face(inst: IlpInstance, b, r, sense: str = "min",
                              solver: Optional[LpSolver] = None,
                              tol: Tolerances = DEFAULT_TOL,
                              base: Optional[LpSolution] = None) -> float:
    """Optimise ``r@x`` over the optimal solution set of ``LP(b)``.

    Returns ``inf`` (sense ``min``) or ``-inf`` (sense ``max``) when ``LP(b)``
    is infeasible, mirroring the convention that an empty minimum is infinite.
    Pass ``base`` to reuse an already solved ``LP(b)``.
    """
    value, _ = face_optimum(inst, b, r, sense, solver=solver, tol=tol, base=base)
    return value


def face_optimum(inst: IlpInstance, b, r, sense: str = "min", solver: Optional[LpSolver] = None,
                 tol: Tolerances = DEFAULT_TOL, base: Optional[LpSolution] = None):
    """Like :func:`outcome_over_optimal_face` but also returns the maximiser/minimiser."""
    if sense not in ("min", "max"):
        raise InputError(f"sense must be 'min' or 'max', got {sense!r}")
    solver = solver or DEFAULT_SOLVER
    b = np.asarray(b, dtype=float).reshape(-1)
    r = np.asarray(r, dtype=float).reshape(-1)
    if r.size != inst.n:
        raise DimensionMismatch(f"r has {r.size} entries, instance has n={inst.n}")
    lp = base if base is not None else solve_lp(inst, b, solver=solver)
    if lp.status is LpStatus.INFEASIBLE:
        return (np.inf if sense == "min" else -np.inf), None
    if lp.status is LpStatus.UNBOUNDED:
        raise InputError("LP(b) is unbounded; the optimal face is empty")
    sign = 1.0 if sense == "min" else -1.0
    on_face = getattr(solver, "solve_on_face", None)
    if on_face is not None:
        face = on_face(inst.A, b, sign * r, lp)
    else:
        A_face = np.vstack([inst.A, inst.c])
        b_face = np.append(b, lp.objective + tol.face_tol(lp.objective))
        face = solver.solve(A_face, b_face, sign * r)
    if face.status is LpStatus.UNBOUNDED:
        return (-np.inf if sense == "min" else np.inf), None
    if face.status is not LpStatus.OPTIMAL:
        raise NumericalFailure(f"optimal-face LP returned {face.status.value}")
    return float(r @ face.x), face.x


def check_basis_optimal(inst: IlpInstance, b, basis: Basis,
                        tol: Tolerances = DEFAULT_TOL) -> BasisCheck:
    sf = inst.standard_form()
    Binv = sf.basis_inverse(basis)
    xB = Binv @ np.asarray(b, dtype=float)
    if np.any(xB < -tol.feasibility):
        return BasisCheck.PRIMAL_INFEASIBLE
    _, rc = sf.reduced_costs(sf.c_tilde, basis)
    if np.any(rc < -tol.optimality):
        return BasisCheck.DUAL_INFEASIBLE
    return BasisCheck.OPTIMAL
