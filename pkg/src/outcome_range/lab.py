"""Random instance generation, comparison metrics and the benchmark harness."""
from __future__ import annotations

import csv
import enum
import io
import logging
import math
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InputError, OutcomeRangeError, RejectionBudgetExhausted, ZeroReference
from .estimate import Method, Target
from .exact import check_unique_bstable, solve_orp_bstable
from .intervals import IntervalVector
from .local_search import SearchParams, local_search
from .lp import IlpInstance, LpStatus, solve_lp
from .oracles import monte_carlo, vertex_oracle
from .superset import solve_superset

logger = logging.getLogger(__name__)


class InstanceClass(enum.Enum):
    CLASS1_BSTABLE = 1
    CLASS2_GENERAL = 2


@dataclass(frozen=True)
class GeneratorConfig:
    m: int
    n: int
    delta: float
    instance_class: InstanceClass = InstanceClass.CLASS2_GENERAL
    rng_seed: int = 0
    max_rejections: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "instance_class", InstanceClass(self.instance_class))
        if self.m < 1 or self.n < 1:
            raise InputError("m and n must be >= 1")
        if self.delta < 0:
            raise InputError("delta must be >= 0")
        if self.instance_class is InstanceClass.CLASS1_BSTABLE and self.max_rejections < 1:
            raise InputError("class 1 generation needs max_rejections >= 1")


def _draw(rng: np.random.Generator, m: int, n: int, delta: float):
    A = rng.integers(-10, 11, size=(m, n)).astype(float)
    A[-1] = rng.integers(1, 11, size=n)
    c = rng.integers(-20, 0, size=n).astype(float)
    b_lower = rng.integers(10, 21, size=m).astype(float)
    r = rng.integers(-20, 21, size=n).astype(float)
    return A, c, b_lower, r


def generate(config: GeneratorConfig) -> tuple[IlpInstance, np.ndarray]:
    """Draw an integer instance; class 1 retries until unique B-stability is certified."""
    rng = np.random.default_rng(config.rng_seed)
    class1 = config.instance_class is InstanceClass.CLASS1_BSTABLE
    attempts = config.max_rejections if class1 else 1000
    for attempt in range(attempts):
        A, c, b_lower, r = _draw(rng, config.m, config.n, config.delta)
        name = f"class{config.instance_class.value}-m{config.m}-n{config.n}-d{config.delta:g}-s{config.rng_seed}"
        inst = IlpInstance(A, c, IntervalVector(b_lower, b_lower + config.delta), name)
        if class1:
            if check_unique_bstable(inst) is not None:
                return inst, r
            continue
        if solve_lp(inst, inst.b.center).status is LpStatus.OPTIMAL:
            return inst, r
    raise RejectionBudgetExhausted(f"no acceptable instance after {attempts} draws")


def gap(estimate: float, reference: float) -> float:
    if reference == 0:
        raise ZeroReference("gap is undefined for a zero reference value")
    return abs(estimate - reference) / abs(reference)


def wag(win_count: int, avg_gap: float, total: int) -> float:
    """Weighted average gap: win frequency times mean gap over all instances."""
    if total < 1 or not 0 <= win_count <= total:
        raise InputError("need 0 <= win_count <= total and total >= 1")
    return win_count * avg_gap / total


@dataclass
class BenchRecord:
    instance_id: str
    method: str
    target: str
    value: Optional[float]
    elapsed_seconds: float
    gap: Optional[float] = None
    error: str = ""
    m: int = 0
    n: int = 0
    delta: float = 0.0
    direction: str = ""


@dataclass(frozen=True)
class BenchCell:
    m: int
    n: int
    delta: float
    instance_class: InstanceClass = InstanceClass.CLASS1_BSTABLE

    def __post_init__(self):
        object.__setattr__(self, "instance_class", InstanceClass(self.instance_class))


@dataclass(frozen=True)
class BenchSettings:
    methods: tuple = (Method.BSTABLE_EXACT, Method.LOCAL_SEARCH)
    search: SearchParams = SearchParams()
    mc_samples: int = 100
    face_grid: int = 3
    oracle_cap: int = 12
    timing: bool = True


def _run_method(method: Method, inst, r, settings: BenchSettings, seed: int, basis):
    if method is Method.BSTABLE_EXACT:
        if basis is None:
            raise OutcomeRangeError("instance is not certified unique B-stable")
        return solve_orp_bstable(inst, r, basis)
    if method is Method.SUPERSET:
        return solve_superset(inst, r)
    if method is Method.LOCAL_SEARCH:
        params = SearchParams(settings.search.Q, settings.search.V, settings.search.max_shakes,
                              settings.search.threshold, seed, settings.search.partitions)
        return local_search(inst, r, "min", params), local_search(inst, r, "max", params)
    if method is Method.VERTEX_ORACLE:
        lo, hi, _ = vertex_oracle(inst, r, settings.face_grid, cap=settings.oracle_cap)
        return lo, hi
    if method is Method.MONTE_CARLO:
        return monte_carlo(inst, r, settings.mc_samples, seed)
    raise InputError(f"unknown method {method}")


def bench_instance(cell: BenchCell, rep: int, seed: int, settings: BenchSettings) -> list[BenchRecord]:
    """Run every configured method on one generated instance; never raises."""
    config = GeneratorConfig(cell.m, cell.n, cell.delta, cell.instance_class, seed)
    instance_id = f"m{cell.m}-n{cell.n}-d{cell.delta:g}-c{cell.instance_class.value}-r{rep}"
    base = dict(m=cell.m, n=cell.n, delta=cell.delta)
    try:
        inst, r = generate(config)
    except OutcomeRangeError as exc:
        return [BenchRecord(instance_id, "generate", t.value, None, 0.0, error=type(exc).__name__,
                            **base) for t in Target]
    basis = check_unique_bstable(inst)
    results: dict = {}
    records = []
    for method in settings.methods:
        start = time.perf_counter()
        try:
            lo, hi = _run_method(method, inst, r, settings, seed, basis)
            elapsed = time.perf_counter() - start
            results[method] = (lo, hi)
            for est in (lo, hi):
                records.append(BenchRecord(instance_id, method.value, est.target.value, est.value,
                                           elapsed, direction=est.direction.value, **base))
        except (OutcomeRangeError, ArithmeticError, np.linalg.LinAlgError) as exc:
            elapsed = time.perf_counter() - start
            logger.warning("%s failed on %s: %s", method.value, instance_id, exc)
            for t in Target:
                records.append(BenchRecord(instance_id, method.value, t.value, None, elapsed,
                                           error=type(exc).__name__, **base))
    reference = _reference(inst, r, results, settings, basis)
    for rec in records:
        ref = reference.get(rec.target)
        if ref is not None and rec.value is not None and ref != 0:
            rec.gap = gap(rec.value, ref)
        if not settings.timing:
            rec.elapsed_seconds = 0.0
    return records


def _reference(inst, r, results, settings: BenchSettings, basis) -> dict:
    if Method.BSTABLE_EXACT in results:
        lo, hi = results[Method.BSTABLE_EXACT]
        return {Target.F_LOWER.value: lo.value, Target.F_UPPER.value: hi.value}
    if basis is not None:
        lo, hi = solve_orp_bstable(inst, r, basis)
        return {Target.F_LOWER.value: lo.value, Target.F_UPPER.value: hi.value}
    if Method.VERTEX_ORACLE in results:
        lo, hi = results[Method.VERTEX_ORACLE]
        if lo.info.get("exact"):
            return {Target.F_LOWER.value: lo.value, Target.F_UPPER.value: hi.value}
    return {}


def run_benchmark(cells: Sequence[BenchCell], settings: BenchSettings = BenchSettings(),
                  repetitions: int = 30, seed: int = 0, jobs: int = 1) -> list[BenchRecord]:
    """Instances ``seed + rep`` for every cell; output order never depends on ``jobs``."""
    tasks = [(cell, rep, seed + rep, settings) for cell in cells for rep in range(repetitions)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_bench_task, tasks))
    else:
        chunks = [_bench_task(t) for t in tasks]
    return [rec for chunk in chunks for rec in chunk]


def _bench_task(task) -> list[BenchRecord]:
    return bench_instance(*task)


RECORD_HEADER = ("instance_id", "method", "target", "value", "gap", "elapsed_seconds", "error")
AGGREGATE_HEADER = ("m", "n", "delta", "method", "target", "mean_gap", "mean_time",
                    "win_count", "wag")


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return repr(float(value))


def records_csv(records: Iterable[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_HEADER)
    for rec in records:
        w.writerow([rec.instance_id, rec.method, rec.target, _fmt(rec.value), _fmt(rec.gap),
                    _fmt(rec.elapsed_seconds), rec.error])
    return buf.getvalue()


@dataclass
class AggregateRow:
    m: int
    n: int
    delta: float
    method: str
    target: str
    mean_gap: Optional[float]
    mean_time: float
    win_count: Optional[int]
    wag: Optional[float]
    gaps: list = field(default_factory=list, repr=False)


COMPETING = (Method.LOCAL_SEARCH.value, Method.MONTE_CARLO.value)


def _mean(values) -> float:
    # fsum keeps aggregates independent of record order
    return math.fsum(values) / len(values)


def _better(target: str, a: float, b: float) -> bool:
    return a < b if target == Target.F_LOWER.value else a > b


def aggregate(records: Sequence[BenchRecord]) -> list[AggregateRow]:
    """Per (m, n, delta, method, target) means plus win counts and WAG.

    Wins are counted among the inner-bound methods of a target (those that
    report values attained by the optimal set).  A method wins an instance
    when it strictly beats every other inner-bound method; its gap on that
    instance is measured against the best competitor value.
    """
    groups: dict = defaultdict(list)
    for rec in records:
        groups[(rec.m, rec.n, rec.delta, rec.method, rec.target)].append(rec)
    inner = defaultdict(dict)
    for rec in records:
        if rec.value is not None and rec.method in COMPETING:
            inner[(rec.instance_id, rec.target)][rec.method] = rec.value
    rows = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], k[3], k[4])):
        m, n, delta, method, target = key
        recs = groups[key]
        gaps = [rec.gap for rec in recs if rec.gap is not None]
        mean_gap = _mean(gaps) if gaps else None
        mean_time = _mean([rec.elapsed_seconds for rec in recs])
        instances = sorted({rec.instance_id for rec in recs})
        win_count = None
        wag_value = None
        contested = [inner[(i, target)] for i in instances if len(inner[(i, target)]) >= 2]
        if method in COMPETING and contested:
            win_gaps = []
            for vals in contested:
                if method not in vals:
                    continue
                others = [v for k, v in vals.items() if k != method]
                best_other = min(others) if target == Target.F_LOWER.value else max(others)
                if _better(target, vals[method], best_other):
                    win_gaps.append(gap(vals[method], best_other) if best_other != 0 else 0.0)
            win_count = len(win_gaps)
            avg = _mean(win_gaps) if win_gaps else 0.0
            wag_value = wag(win_count, avg, len(contested))
        rows.append(AggregateRow(m, n, delta, method, target, mean_gap, mean_time, win_count,
                                 wag_value, gaps))
    return rows


def aggregate_csv(rows: Iterable[AggregateRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AGGREGATE_HEADER)
    for row in rows:
        w.writerow([row.m, row.n, repr(float(row.delta)), row.method, row.target,
                    _fmt(row.mean_gap), _fmt(row.mean_time),
                    "" if row.win_count is None else row.win_count, _fmt(row.wag)])
    return buf.getvalue()
