import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outcome_range.errors import EmptyPerturbationSet, InitialInfeasible, InputError
from outcome_range.estimate import Direction, Target
from outcome_range.intervals import IntervalVector
from outcome_range.lab import GeneratorConfig, generate
from outcome_range.local_search import (
    NeighborhoodMove,
    SearchParams,
    apply_move,
    local_search,
    subset_size,
)
from outcome_range.lp import face_optimum, outcome_over_optimal_face
from outcome_range.oracles import vertex_oracle

from conftest import make_instance

BOX = IntervalVector([4], [7])
FAST = SearchParams(Q=(0.25, 1.0), V=(0.5, 1.0), max_shakes=0)


def test_apply_move_examples():
    assert apply_move(NeighborhoodMove(np.array([5.0]), 0.5, (0,), "plus", BOX))[0] == 6
    assert apply_move(NeighborhoodMove(np.array([5.0]), 1.0, (0,), "minus", BOX))[0] == 4
    box = IntervalVector([4, -6, 4], [7, 8, 9])
    b = apply_move(NeighborhoodMove(box.center, 1.0, (0, 1, 2), "plus", box))
    np.testing.assert_array_equal(b, box.upper)


def test_apply_move_errors():
    with pytest.raises(EmptyPerturbationSet):
        apply_move(NeighborhoodMove(np.array([5.0]), 0.5, (), "plus", BOX))
    with pytest.raises(InputError):
        NeighborhoodMove(np.array([5.0]), 0.5, (0,), "sideways", BOX)


def test_subset_size():
    assert subset_size(0.05, 10) == 1
    assert subset_size(0.5, 10) == 5
    assert subset_size(1.0, 7) == 7


@pytest.mark.parametrize("kwargs", [dict(Q=()), dict(V=(0.0,)), dict(Q=(1.5,)),
                                    dict(max_shakes=-1), dict(threshold=0.0),
                                    dict(partitions=((),))])
def test_invalid_params(kwargs):
    with pytest.raises(InputError):
        SearchParams(**kwargs)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.floats(0, 1), st.sampled_from(["plus", "minus"]), st.integers(0, 10**6))
def test_moves_stay_in_box(m, k, direction, seed):
    rng = np.random.default_rng(seed)
    lo = rng.uniform(-10, 10, m)
    box = IntervalVector(lo, lo + rng.uniform(0, 5, m))
    base = rng.uniform(box.lower, box.upper)
    P = tuple(sorted(rng.choice(m, size=rng.integers(1, m + 1), replace=False).tolist()))
    b = apply_move(NeighborhoodMove(base, k, P, direction, box))
    assert box.contains(b)
    untouched = [i for i in range(m) if i not in P]
    np.testing.assert_array_equal(b[untouched], base[untouched])


@pytest.mark.parametrize("seed", range(5))
def test_example1_attains_extremes(example1, seed):
    inst, r = example1
    lo = local_search(inst, r, "min", SearchParams(rng_seed=seed))
    hi = local_search(inst, r, "max", SearchParams(rng_seed=seed))
    assert lo.value == pytest.approx(36, abs=1e-6)
    assert hi.value == pytest.approx(81, abs=1e-6)
    assert (lo.direction, hi.direction) == (Direction.UPPER_BOUND, Direction.LOWER_BOUND)
    _, x = face_optimum(inst, lo.witness, r, "min")
    np.testing.assert_allclose(x, [0, 4], atol=1e-9)
    _, x = face_optimum(inst, hi.witness, r, "max")
    np.testing.assert_allclose(x, [0, 9], atol=1e-9)


def test_transportation(transportation):
    inst, r = transportation
    assert local_search(inst, r, "min").value == pytest.approx(3940, abs=1e-6)
    assert local_search(inst, r, "max").value == pytest.approx(4056, abs=1e-6)


def test_point_interval(example1):
    inst, r = example1
    point = inst.with_bounds([5, 1, 6], [5, 1, 6])
    est = local_search(point, r, "min", FAST)
    assert est.value == pytest.approx(outcome_over_optimal_face(inst, [5, 1, 6], r, "min"))


def test_initial_infeasible():
    inst = make_instance([[1, 1], [-1, -1]], [-1, -1], [1, -5], [2, -4])
    with pytest.raises(InitialInfeasible):
        local_search(inst, [1, 1], "min", FAST)


def test_bad_sense(example1):
    with pytest.raises(InputError):
        local_search(*example1, sense="up")


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**5), st.sampled_from(["min", "max"]))
def test_soundness_monotonicity_determinism(seed, sense):
    inst, r = generate(GeneratorConfig(4, 6, 1.0, 2, seed))
    params = SearchParams(rng_seed=seed)
    est = local_search(inst, r, sense, params)
    again = local_search(inst, r, sense, params)
    assert est.value == again.value and est.info["trace"] == again.info["trace"]
    np.testing.assert_array_equal(est.witness, again.witness)
    assert inst.b.contains(est.witness)
    assert est.value == pytest.approx(outcome_over_optimal_face(inst, est.witness, r, sense), abs=1e-9)
    trace = np.array(est.info["trace"])
    steps = np.diff(trace)
    assert np.all(steps <= 0) if sense == "min" else np.all(steps >= 0)
    lo, hi, exact = vertex_oracle(inst, r)
    if exact:
        tol = 1e-7 * max(1, abs(lo.value), abs(hi.value))
        assert est.value >= lo.value - tol if sense == "min" else est.value <= hi.value + tol


def test_partitions_option(transportation):
    inst, r = transportation
    groups = (((0, 1, 2), (3, 4, 5)), ((3,), (4,), (5,)))
    est = local_search(inst, r, "min", SearchParams(partitions=groups))
    assert est.target is Target.F_LOWER
    assert est.value == pytest.approx(3940, abs=1e-6)
