"""Command line interface: ``orp solve | generate | bench | examples``.

Exit codes: 0 success, 1 input error, 2 solver failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import instance_io
from .errors import InputError, OutcomeRangeError
from .estimate import Method, Target
from .exact import check_unique_bstable, optimal_value_range, solve_orp_bstable
from .lab import (
    BenchCell,
    BenchSettings,
    GeneratorConfig,
    aggregate,
    aggregate_csv,
    generate,
    records_csv,
    run_benchmark,
)
from .local_search import DEFAULT_Q, DEFAULT_V, SearchParams, local_search
from .oracles import monte_carlo, vertex_oracle
from .superset import solve_superset

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2

METHOD_NAMES = {
    "exact": Method.BSTABLE_EXACT,
    "superset": Method.SUPERSET,
    "local-search": Method.LOCAL_SEARCH,
    "oracle": Method.VERTEX_ORACLE,
    "monte-carlo": Method.MONTE_CARLO,
}


class NotApplicable(OutcomeRangeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="orp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="bound the outcome range of one instance")
    p.add_argument("instance", help="instance JSON file or bundled name (see 'orp examples')")
    p.add_argument("--method", action="append", choices=[*METHOD_NAMES, "all"],
                   help="method to run; repeatable (default: oracle)")
    p.add_argument("--target", choices=("min", "max", "both"), default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ls-q", type=_floats, default=DEFAULT_Q)
    p.add_argument("--ls-v", type=_floats, default=DEFAULT_V)
    p.add_argument("--ls-shakes", type=int, default=1)
    p.add_argument("--ls-threshold", type=float, default=0.001)
    p.add_argument("--mc-samples", type=int, default=100)
    p.add_argument("--face-grid", type=int, default=3)
    p.add_argument("--value-range", action="store_true", help="also report [z_lower, z_upper]")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--jobs", type=int, default=1)

    g = sub.add_parser("generate", help="write a random instance file")
    g.add_argument("--class", dest="instance_class", type=int, choices=(1, 2), default=2)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--delta", type=float, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-rejections", type=int, default=10_000)
    g.add_argument("--out", "-o", help="output path (default: stdout)")

    b = sub.add_parser("bench", help="run a benchmark described by a JSON config")
    b.add_argument("config")
    b.add_argument("--out-dir", required=True)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--no-timing", action="store_true",
                   help="write 0 for all timings so repeated runs are byte-identical")

    e = sub.add_parser("examples", help="list or export the bundled instances")
    e.add_argument("--dump", metavar="DIR", help="copy the bundled files into DIR")
    return parser


def _run_solve_method(name: str, inst, r, args) -> list:
    method = METHOD_NAMES[name]
    if method is Method.BSTABLE_EXACT:
        basis = check_unique_bstable(inst)
        if basis is None:
            raise NotApplicable("instance is not certified unique B-stable")
        ests = list(solve_orp_bstable(inst, r, basis))
    elif method is Method.SUPERSET:
        ests = list(solve_superset(inst, r))
    elif method is Method.LOCAL_SEARCH:
        params = SearchParams(args.ls_q, args.ls_v, args.ls_shakes, args.ls_threshold, args.seed)
        ests = [local_search(inst, r, sense, params) for sense in _senses(args.target)]
    elif method is Method.VERTEX_ORACLE:
        lo, hi, _ = vertex_oracle(inst, r, args.face_grid)
        ests = [lo, hi]
    else:
        ests = list(monte_carlo(inst, r, args.mc_samples, args.seed))
    wanted = {Target.F_LOWER if s == "min" else Target.F_UPPER for s in _senses(args.target)}
    return [e for e in ests if e.target in wanted]


def _senses(target: str) -> tuple:
    return {"min": ("min",), "max": ("max",), "both": ("min", "max")}[target]


def _solve_task(task):
    name, inst, r, args = task
    try:
        return name, _run_solve_method(name, inst, r, args), None
    except NotApplicable as exc:
        return name, [], ("skipped", str(exc))
    except OutcomeRangeError as exc:
        return name, [], ("failed", f"{type(exc).__name__}: {exc}")


def _fmt_value(v: float) -> str:
    if np.isinf(v):
        return "infeasible" if v > 0 else "unbounded"
    return f"{v:.10g}"


def _render(rows: list, notes: list, vr, fmt: str) -> str:
    if fmt == "json":
        payload = {"estimates": rows, "notes": [{"method": m, "status": s, "message": t}
                                                for m, s, t in notes]}
        if vr is not None:
            payload["value_range"] = {"z_lower": _json_num(vr.z_lower), "z_upper": _json_num(vr.z_upper),
                                      "lower_status": vr.lower_status.value,
                                      "upper_status": vr.upper_status.value}
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "target", "direction", "value", "elapsed_seconds", "witness"])
        for row in rows:
            wit = "" if row["witness"] is None else " ".join(f"{v:.10g}" for v in row["witness"])
            w.writerow([row["method"], row["target"], row["direction"], repr(row["value"]),
                        repr(row["elapsed"]), wit])
        if vr is not None:
            w.writerow(["value_range", "z_lower", vr.lower_status.value, repr(vr.z_lower), "", ""])
            w.writerow(["value_range", "z_upper", vr.upper_status.value, repr(vr.z_upper), "", ""])
        return buf.getvalue()
    lines = []
    if vr is not None:
        lines.append(f"optimal value range: [{_fmt_value(vr.z_lower)}, {_fmt_value(vr.z_upper)}]")
    header = f"{'method':<13} {'target':<8} {'direction':<12} {'value':>16} {'time[s]':>9}  witness"
    lines.append(header)
    lines.append("-" * len(header))
    for row in rows:
        wit = "-" if row["witness"] is None else "(" + ", ".join(f"{v:g}" for v in row["witness"]) + ")"
        lines.append(f"{row['method']:<13} {row['target']:<8} {row['direction']:<12} "
                     f"{_fmt_value(row['value']):>16} {row['elapsed']:>9.4f}  {wit}")
    by_method = {}
    for row in rows:
        by_method.setdefault(row["method"], {})[row["target"]] = row["value"]
    for method, vals in by_method.items():
        if len(vals) == 2:
            lines.append(f"outcome range ({method}): [{_fmt_value(vals['f_lower'])}, "
                         f"{_fmt_value(vals['f_upper'])}]")
    for method, status, text in notes:
        lines.append(f"{method}: {status}: {text}")
    return "\n".join(lines) + "\n"


def _json_num(v: float):
    if np.isinf(v):
        return "infeasible" if v > 0 else "unbounded"
    return v


def cmd_solve(args) -> int:
    inst, r = instance_io.read_instance(args.instance)
    names = args.method or ["oracle"]
    if "all" in names:
        names = list(METHOD_NAMES)
    names = list(dict.fromkeys(names))
    tasks = [(name, inst, r, args) for name in names]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_solve_task, tasks))
    else:
        results = [_solve_task(t) for t in tasks]
    rows, notes = [], []
    failed = False
    for name, ests, note in results:
        for est in ests:
            rows.append({"method": name, **{k: v for k, v in est.as_dict().items() if k != "method"}})
        if note is not None:
            notes.append((name, *note))
            # an inapplicable method is only an error when it was the sole request
            failed |= note[0] == "failed" or len(names) == 1
    vr = optimal_value_range(inst) if args.value_range else None
    text = _render(rows, notes, vr, args.format)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_SOLVER if failed else EXIT_OK


def cmd_generate(args) -> int:
    config = GeneratorConfig(args.m, args.n, args.delta, args.instance_class, args.seed,
                             args.max_rejections)
    inst, r = generate(config)
    text = instance_io.dumps(inst, r)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def load_bench_config(path) -> tuple[list, BenchSettings, int, int]:
    """Parse a bench config; returns ``(cells, settings, repetitions, seed)``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot load bench config {path}: {exc}") from exc
    try:
        cells = [BenchCell(int(c["m"]), int(c["n"]), float(c["delta"]), int(c.get("class", 1)))
                 for c in data["cells"]]
        methods = tuple(METHOD_NAMES[name] for name in data.get("methods", ["exact", "local-search"]))
        ls = data.get("search", {})
        search = SearchParams(tuple(ls.get("Q", DEFAULT_Q)), tuple(ls.get("V", DEFAULT_V)),
                              int(ls.get("max_shakes", 1)), float(ls.get("threshold", 0.001)))
        settings = BenchSettings(methods, search, int(data.get("mc_samples", 100)),
                                 int(data.get("face_grid", 3)), int(data.get("oracle_cap", 12)),
                                 bool(data.get("timing", True)))
        return cells, settings, int(data.get("repetitions", 30)), int(data.get("seed", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid bench config: {exc!r}") from exc


def cmd_bench(args) -> int:
    cells, settings, reps, seed = load_bench_config(args.config)
    if args.no_timing:
        settings = BenchSettings(settings.methods, settings.search, settings.mc_samples,
                                 settings.face_grid, settings.oracle_cap, timing=False)
    records = run_benchmark(cells, settings, reps, seed, jobs=args.jobs)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "records.csv").write_text(records_csv(records), encoding="utf-8")
    (out / "aggregate.csv").write_text(aggregate_csv(aggregate(records)), encoding="utf-8")
    print(f"wrote {len(records)} records to {out / 'records.csv'} and {out / 'aggregate.csv'}")
    return EXIT_OK


def cmd_examples(args) -> int:
    for name in instance_io.BUNDLED:
        inst, r = instance_io.bundled(name)
        print(f"{name:<15} m={inst.m:<3} n={inst.n:<3} {inst.name or ''}")
        if args.dump:
            Path(args.dump).mkdir(parents=True, exist_ok=True)
            instance_io.write_instance(Path(args.dump) / f"{name}.json", inst, r)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "generate": cmd_generate, "bench": cmd_bench,
            "examples": cmd_examples}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OutcomeRangeError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
