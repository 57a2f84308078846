import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outcome_range.estimate import Direction, Method, Target
from outcome_range.exact import (
    check_unique_bstable,
    cone_outcome_range,
    cone_sufficient_check,
    optimal_value_range,
    solve_orp_bstable,
)
from outcome_range.intervals import IntervalVector
from outcome_range.lab import GeneratorConfig, generate
from outcome_range.lp import Basis, BasisCheck, LpStatus, check_basis_optimal, outcome_over_optimal_face, solve_lp
from outcome_range.oracles import scenario_outcome

from conftest import rel_close


def test_value_range_examples(example2, transportation):
    vr = optimal_value_range(example2[0])
    assert vr.z_lower == pytest.approx(-20)
    assert vr.z_upper == np.inf and vr.upper_status is LpStatus.INFEASIBLE
    assert not vr.finite
    vr = optimal_value_range(transportation[0])
    assert (vr.z_lower, vr.z_upper) == (pytest.approx(4945), pytest.approx(5099))


def test_value_range_point_interval(example1):
    inst, _ = example1
    point = inst.with_bounds([5, 1, 6], [5, 1, 6])
    vr = optimal_value_range(point)
    assert vr.z_lower == vr.z_upper == solve_lp(inst, [5, 1, 6]).objective


def test_example3_slack_basis(example3):
    inst, r = example3
    basis = check_unique_bstable(inst)
    assert basis == Basis((2,))
    lo, hi = solve_orp_bstable(inst, r, basis)
    assert lo.value == pytest.approx(0, abs=1e-12) and hi.value == pytest.approx(0, abs=1e-12)
    assert lo.direction is Direction.EXACT and lo.method is Method.BSTABLE_EXACT
    assert (lo.target, hi.target) == (Target.F_LOWER, Target.F_UPPER)


def test_example2_is_not_bstable(example2):
    inst, _ = example2
    assert check_unique_bstable(inst) is None
    # cross-check: the optimal basis at b_c is not optimal on every vertex
    basis = solve_lp(inst, inst.b.center).basis
    verdicts = {check_basis_optimal(inst, [b], basis) for b in (-1.0, 5.0)}
    assert verdicts != {BasisCheck.OPTIMAL}


def test_example1_is_not_bstable(example1):
    assert check_unique_bstable(example1[0]) is None


@pytest.mark.parametrize("seed", range(10))
def test_class1_always_certified(seed):
    inst, _ = generate(GeneratorConfig(6, 9, 0.1, 1, seed))
    basis = check_unique_bstable(inst)
    assert basis is not None
    for b in (inst.b.lower, inst.b.upper, inst.b.center):
        assert check_basis_optimal(inst, b, basis) is BasisCheck.OPTIMAL


@pytest.mark.parametrize("seed", range(10))
def test_point_interval_equals_face(seed):
    inst, r = generate(GeneratorConfig(5, 8, 0.0, 1, seed))
    basis = check_unique_bstable(inst)
    lo, hi = solve_orp_bstable(inst, r, basis)
    b = inst.b.lower
    assert rel_close(lo.value, outcome_over_optimal_face(inst, b, r, "min"), 1e-9)
    assert rel_close(hi.value, outcome_over_optimal_face(inst, b, r, "max"), 1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**5), st.integers(2, 7), st.sampled_from([0.1, 0.5, 1.0]))
def test_witness_attains_value(seed, m, delta):
    inst, r = generate(GeneratorConfig(m, m + 3, delta, 1, seed))
    lo, hi = solve_orp_bstable(inst, r, check_unique_bstable(inst))
    assert lo.value <= hi.value + 1e-9
    for est in (lo, hi):
        assert inst.b.contains(est.witness, tol=1e-7)
        x = est.info["x"]
        assert rel_close(r @ x, est.value, 1e-9)
    out = scenario_outcome(inst, lo.witness, r)
    assert rel_close(out.f_min, lo.value, 1e-6)
    out = scenario_outcome(inst, hi.witness, r)
    assert rel_close(out.f_max, hi.value, 1e-6)


def test_cone_check_examples(example3):
    inst, r = example3
    basis = check_unique_bstable(inst)
    assert cone_sufficient_check(inst, r, basis)
    assert cone_sufficient_check(inst, inst.c, basis)
    assert not cone_sufficient_check(inst, -inst.c, basis)
    assert cone_outcome_range(inst, r) == (pytest.approx(0), pytest.approx(0))


@pytest.mark.parametrize("seed", range(8))
def test_cone_range_matches_exact_when_r_equals_c(seed):
    inst, _ = generate(GeneratorConfig(5, 8, 0.5, 1, seed))
    basis = check_unique_bstable(inst)
    assert cone_sufficient_check(inst, inst.c, basis)
    lo, hi = solve_orp_bstable(inst, inst.c, basis)
    clo, chi = cone_outcome_range(inst, inst.c)
    assert rel_close(lo.value, clo) and rel_close(hi.value, chi)
    vr = optimal_value_range(inst)
    assert rel_close(lo.value, vr.z_lower) and rel_close(hi.value, vr.z_upper)


def test_estimate_rejects_exact_from_heuristic():
    from outcome_range.errors import InputError
    from outcome_range.estimate import OutcomeRangeEstimate
    with pytest.raises(InputError):
        OutcomeRangeEstimate(Target.F_LOWER, Direction.EXACT, 1.0, Method.LOCAL_SEARCH)
