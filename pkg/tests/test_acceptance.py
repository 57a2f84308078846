"""Acceptance suite: ten end-to-end criteria, one PASS/FAIL line each.

Run with ``pytest -v tests/test_acceptance.py``; the lines are collected in
an "acceptance criteria" section of the terminal summary.
"""
import json
import time

import numpy as np

from outcome_range import instance_io
from outcome_range.cli import main as cli_main
from outcome_range.exact import check_unique_bstable, optimal_value_range, solve_orp_bstable
from outcome_range.intervals import ScenarioClass, classify_scenario, vertex_scenarios
from outcome_range.lab import GeneratorConfig, gap, generate
from outcome_range.local_search import SearchParams, local_search
from outcome_range.lp import LpStatus, solve_lp
from outcome_range.oracles import monte_carlo, vertex_oracle
from outcome_range.superset import build_relaxation, dual_box, solve_superset

from conftest import ACCEPTANCE_LINES

ABS = 1e-6


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


def rel_close(a, b, rtol=1e-6):
    return abs(a - b) <= rtol * max(1.0, abs(b))


def test_criterion_01_example1():
    inst, r = instance_io.bundled("example1")
    (lo, hi, exact), t_oracle = timed(vertex_oracle, inst, r)
    ok = exact and abs(lo.value - 36) <= ABS and abs(hi.value - 81) <= ABS
    slowest = t_oracle
    ls_values = []
    for seed in range(5):
        params = SearchParams(rng_seed=seed)
        a, ta = timed(local_search, inst, r, "min", params)
        b, tb = timed(local_search, inst, r, "max", params)
        ls_values.append((a.value, b.value))
        ok &= abs(a.value - 36) <= ABS and abs(b.value - 81) <= ABS
        slowest = max(slowest, ta, tb)
    (slo, shi), t_sup = timed(solve_superset, inst, r)
    ok &= slo.value <= 36 + ABS and shi.value >= 81 - ABS
    slowest = max(slowest, t_sup)
    ok &= slowest < 1.0
    report(1, ok, f"oracle=({lo.value:g}, {hi.value:g}) local search seeds 0-4={ls_values} "
                  f"superset=({slo.value:.6g}, {shi.value:.6g}) slowest call {slowest:.2f}s")
    assert ok


def test_criterion_02_example2():
    inst, r = instance_io.bundled("example2")
    vr = optimal_value_range(inst)
    lo, hi, _ = vertex_oracle(inst, r)
    ok = (abs(vr.z_lower + 20) <= ABS and vr.upper_status is LpStatus.INFEASIBLE
          and abs(lo.value + 20) <= ABS and abs(hi.value) <= ABS)
    report(2, ok, f"value range=({vr.z_lower:g}, {vr.upper_status.value}) "
                  f"outcome range=({lo.value:g}, {hi.value:g})")
    assert ok


def test_criterion_03_example3():
    inst, r = instance_io.bundled("example3")
    basis = check_unique_bstable(inst)
    ok = basis is not None
    if ok:
        elo, ehi = solve_orp_bstable(inst, r, basis)
        olo, ohi, _ = vertex_oracle(inst, r)
        vals = (elo.value, ehi.value, olo.value, ohi.value)
        ok = all(abs(v) <= ABS for v in vals)
    report(3, ok, f"basis={None if basis is None else basis.indices} "
                  f"exact/oracle={vals if basis is not None else '-'}")
    assert ok


def test_criterion_04_transportation():
    inst, r = instance_io.bundled("transportation")
    start = time.perf_counter()
    b = np.concatenate([inst.b.lower[:3], [-85, -64, -71]])
    cost = solve_lp(inst, b).objective
    lo, hi, _ = vertex_oracle(inst, r)
    elapsed = time.perf_counter() - start
    classes = [classify_scenario(e.witness, inst.b) for e in (lo, hi)]
    ok = (abs(cost - 4945) <= ABS and abs(lo.value - 3940) <= ABS and abs(hi.value - 4056) <= ABS
          and all(c is ScenarioClass.STRONGLY_EXTREMAL for c in classes) and elapsed < 2.0)
    report(4, ok, f"cost={cost:g} outcome range=({lo.value:g}, {hi.value:g}) "
                  f"witnesses={[c.value for c in classes]} {elapsed:.2f}s")
    assert ok


def test_criterion_05_class1_desk_scale():
    gaps, exact_times, sandwiches = [], [], 0
    for seed in range(30):
        inst, r = generate(GeneratorConfig(10, 15, 0.1, 1, seed))
        start = time.perf_counter()
        basis = check_unique_bstable(inst)
        lo, hi = solve_orp_bstable(inst, r, basis)
        exact_times.append(time.perf_counter() - start)
        slo, shi = solve_superset(inst, r)
        tol_lo, tol_hi = ABS * max(1, abs(lo.value)), ABS * max(1, abs(hi.value))
        sandwiches += slo.value <= lo.value + tol_lo and shi.value >= hi.value - tol_hi
        ls = local_search(inst, r, "min", SearchParams(rng_seed=seed))
        gaps.append(gap(ls.value, lo.value))
    mean_gap, mean_time = float(np.mean(gaps)), float(np.mean(exact_times))
    ok = mean_gap <= 0.02 and mean_time < 0.5 and sandwiches == 30
    report(5, ok, f"mean local-search gap={mean_gap:.2e} mean exact time={mean_time * 1e3:.1f}ms "
                  f"superset sandwich {sandwiches}/30")
    assert ok


def test_criterion_06_oracle_equivalence():
    agree = 0
    for seed in range(50):
        m = 3 + seed % 8
        inst, r = generate(GeneratorConfig(m, m + 5, (0.1, 0.5, 1.0)[seed % 3], 1, 1000 + seed))
        lo, hi = solve_orp_bstable(inst, r, check_unique_bstable(inst))
        olo, ohi, _ = vertex_oracle(inst, r)
        agree += rel_close(lo.value, olo.value) and rel_close(hi.value, ohi.value)
    ok = agree == 50
    report(6, ok, f"exact method agrees with vertex oracle on {agree}/50 instances (m=3..10)")
    assert ok


def test_criterion_07_extremal_witnesses():
    found, seed, all_ok = 0, 0, True
    seen = set()
    while found < 50 and seed < 2000:
        inst, r = generate(GeneratorConfig(3 + seed % 4, 6 + seed % 4, 1.0, 2, seed))
        seed += 1
        assert not inst.b.contains_zero()
        lo, hi, exact = vertex_oracle(inst, r)
        if not exact:
            continue
        found += 1
        for est in (lo, hi):
            cls = classify_scenario(est.witness, inst.b)
            seen.add(cls.value)
            # the flag certifies non-degenerate vertex LPs, which calls for strong extremality
            all_ok &= cls is ScenarioClass.STRONGLY_EXTREMAL
    ok = found == 50 and all_ok
    report(7, ok, f"{found} exact-flag instances from {seed} draws, witness classes={sorted(seen)}")
    assert ok


def test_criterion_08_monte_carlo_containment():
    contained, narrower = 0, 0
    for seed in range(30):
        m = 3 + seed % 6
        inst, r = generate(GeneratorConfig(m, m + 3, 1.0, 2, 500 + seed))
        olo, ohi, _ = vertex_oracle(inst, r)
        mlo, mhi = monte_carlo(inst, r, 100, seed)
        tol = 1e-9 * max(1, abs(olo.value), abs(ohi.value))
        contained += mlo.value >= olo.value - tol and mhi.value <= ohi.value + tol
        narrower += mlo.value > olo.value + tol or mhi.value < ohi.value - tol
    ok = contained == 30 and narrower >= 1
    report(8, ok, f"Monte Carlo range inside oracle range {contained}/30, strictly narrower {narrower}/30")
    assert ok


def test_criterion_09_mccormick_validity():
    checked, worst = 0, 0.0
    for seed in range(20):
        m = 3 + seed % 5
        inst, r = generate(GeneratorConfig(m, m + 2, 1.0, 2, 300 + seed))
        model = build_relaxation(inst, r, dual_box(inst, allow_unbounded=True))
        rng = np.random.default_rng(seed)
        scenarios = list(vertex_scenarios(inst.b))
        scenarios += [rng.uniform(inst.b.lower, inst.b.upper) for _ in range(20)]
        for b in scenarios:
            sol = solve_lp(inst, b)
            if sol.status is LpStatus.OPTIMAL:
                checked += 1
                worst = max(worst, model.max_violation(sol.x, sol.duals, b))
    ok = checked > 0 and worst <= 1e-7
    report(9, ok, f"{checked} solved scenario triples over 20 instances, worst violation {worst:.1e}")
    assert ok


def test_criterion_10_bench_determinism(tmp_path):
    cfg = {"cells": [{"m": 4, "n": 6, "delta": 0.1, "class": 1},
                     {"m": 5, "n": 7, "delta": 1.0, "class": 2}],
           "repetitions": 3, "seed": 11,
           "methods": ["exact", "superset", "local-search", "oracle", "monte-carlo"],
           "mc_samples": 25}
    path = tmp_path / "bench.json"
    path.write_text(json.dumps(cfg))
    codes = [cli_main(["bench", str(path), "--out-dir", str(tmp_path / d), "--no-timing"])
             for d in ("a", "b")]
    same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
               for f in ("records.csv", "aggregate.csv"))
    ok = codes == [0, 0] and same
    report(10, ok, f"two bench runs with equal seeds give byte-identical CSVs: {same}")
    assert ok
