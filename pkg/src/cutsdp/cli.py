"""Command-line harness: instance generation, bounds, exact values, benchmarks.

Subcommands:
  gen     write a random instance as an edge list
  lb      cutting-plane lower bound (plus the rounding upper bound)
  ub      upper bound and witness ordering from the full pipeline
  exact   exact cutwidth by the subset dynamic program (n <= 24)
  bench   grid of instances, one summary row each
  trace   per-iteration bound under the three family schedules

Exit codes: 0 ok, 1 usage error, 2 runtime error, 3 size cap exceeded.

Output is CSV by default (json-lines via --format).  A generation-time header
comment and the wall-clock columns are suppressed by --no-timestamp so that
reruns with the same seed are byte-identical.
"""

import argparse
import csv
import io
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

from .graph import (
    ParseError,
    SizeLimitError,
    format_edge_list,
    gen_erdos_renyi,
    gen_random_geometric,
    load_edge_list,
)
from .lower_bound import SCHEDULES, DriverParams, compute_lower_bound
from .ordering import SUBSET_DP_MAX_N, exact_cutwidth_subset_dp
from .sdp_solver import SolverSettings
from .upper_bound import compute_upper_bound
from . import cuts as cut_families

log = logging.getLogger(__name__)

SUMMARY_FIELDS = [
    "model", "n", "param", "density", "seed",
    "lb_init", "lb_final", "lb_integer", "ub", "gap_final", "gap_raw",
    "time_total", "time_sdp", "time_sep", "time_ub", "n_cuts", "status",
]
ITER_FIELDS = [
    "iteration", "alpha", "n_new_cuts", "n_pruned", "pool_size",
    "time_solve", "time_sep", "families", "solver_status",
]
TIME_FIELDS = ("time_total", "time_sdp", "time_sep", "time_ub", "time_solve")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_range(text, kind=float):
    """'0.3' -> [0.3]; '0.3:0.9:0.2' -> [0.3, 0.5, 0.7, 0.9] (inclusive)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (kind(p) for p in parts)
        if step <= 0:
            raise UsageError("range step must be positive")
        values = []
        v = start
        while v <= stop + 1e-9:
            values.append(kind(round(v, 10)))
            v += step
        return values
    return [kind(text)]


def _parse_seeds(text):
    """'1..5' -> [1,...,5]; '1,4,9' -> [1,4,9]; '7' -> [7]."""
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",")]


def _parse_instance_arg(text, name):
    head, _, rest = text.partition(",")
    if not rest:
        raise UsageError(f"--{name} expects 'n,value', got {text!r}")
    ns = _parse_range(head, int)
    vals = _parse_range(rest, float)
    return ns, vals


def _make_graph(args):
    sources = [s for s in (args.graph, args.er, args.rgg) if s]
    if len(sources) != 1:
        raise UsageError("exactly one of --graph, --er, --rgg is required")
    if args.graph:
        try:
            with open(args.graph, encoding="utf-8") as fp:
                return load_edge_list(fp.read()), ("file", args.graph)
        except OSError as exc:
            raise UsageError(f"cannot read {args.graph}: {exc}") from exc
    if args.er:
        ns, ps = _parse_instance_arg(args.er, "er")
        if len(ns) != 1 or len(ps) != 1:
            raise UsageError("ranges are only valid for bench")
        return gen_erdos_renyi(ns[0], ps[0], args.seed), ("er", ps[0])
    ns, ds = _parse_instance_arg(args.rgg, "rgg")
    if len(ns) != 1 or len(ds) != 1:
        raise UsageError("ranges are only valid for bench")
    return gen_random_geometric(ns[0], ds[0], args.seed), ("rgg", ds[0])


def _solver_settings(args) -> SolverSettings:
    return SolverSettings(
        tol_primal=args.tol_primal,
        tol_dual=args.tol_dual,
        tol_gap=args.tol_gap,
        max_iterations=args.solver_max_iter,
        verbose=args.verbose,
    )


def _driver_params(args, schedule=None) -> DriverParams:
    schedule_fn = SCHEDULES[schedule or args.schedule]
    if args.families:
        allowed = tuple(args.families)
        base = schedule_fn
        def schedule_fn(iteration, _base=base, _allowed=allowed):
            kept = tuple(k for k in _base(iteration) if k in _allowed)
            return kept or _allowed[:1]
    return DriverParams(
        max_iter=args.max_iter,
        improvement_min=args.improvement_min,
        num_cuts=args.num_cuts,
        min_violation=args.min_violation,
        schedule=schedule_fn,
        time_limit_sec=args.time_limit_sec,
    )


def _run_instance(graph, model, param, seed, args, with_ub=True, schedule=None):
    params = _driver_params(args, schedule=schedule)
    settings = _solver_settings(args)
    report = compute_lower_bound(graph, params, settings, master_seed=seed)
    if with_ub:
        t0 = time.perf_counter()
        ub, witness = compute_upper_bound(
            graph, report.Xbar, seed=seed, restarts=getattr(args, "ub_restarts", 1)
        )
        report.ub = ub
        report.ub_time = time.perf_counter() - t0
        report.ub_witness = witness
    return report


def _summary_row(report, model, param, seed, density):
    return {
        "model": model,
        "n": report.n,
        "param": _fmt(param),
        "density": f"{density:.4f}",
        "seed": seed,
        "lb_init": f"{report.alpha_init:.6f}",
        "lb_final": f"{report.alpha_final:.6f}",
        "lb_integer": report.lb_integer,
        "ub": report.ub if report.ub is not None else "",
        "gap_final": _fmt(report.gap_ceiled(), "{:.4f}"),
        "gap_raw": _fmt(report.gap_raw(), "{:.4f}"),
        "time_total": f"{report.time_total + (report.ub_time or 0.0):.2f}",
        "time_sdp": f"{report.time_sdp:.2f}",
        "time_sep": f"{report.time_separation:.2f}",
        "time_ub": f"{report.ub_time:.2f}" if report.ub_time is not None else "",
        "n_cuts": report.cuts_added_total,
        "status": report.status,
    }


def _iteration_rows(report):
    rows = [{
        "iteration": 0,
        "alpha": f"{report.alpha_init:.6f}",
        "n_new_cuts": 0,
        "n_pruned": 0,
        "pool_size": 0,
        "time_solve": "",
        "time_sep": "",
        "families": "",
        "solver_status": "",
    }]
    for rec in report.iterations:
        rows.append({
            "iteration": rec.iteration,
            "alpha": f"{rec.alpha:.6f}",
            "n_new_cuts": rec.n_new_cuts,
            "n_pruned": rec.n_pruned,
            "pool_size": rec.pool_size,
            "time_solve": f"{rec.solve_time:.2f}",
            "time_sep": f"{rec.separation_time:.2f}",
            "families": "+".join(rec.families),
            "solver_status": rec.solver_status,
        })
    return rows


def _fmt(value, spec="{}"):
    if value is None:
        return ""
    if isinstance(value, float):
        return spec.format(value) if spec != "{}" else f"{value:g}"
    return spec.format(value)


def _strip_times(rows):
    for row in rows:
        for key in TIME_FIELDS:
            if key in row:
                row[key] = ""
    return rows


def _emit(rows, fields, args, section=None):
    """Write rows as CSV (or json-lines) to --out or stdout."""
    if args.no_timestamp:
        rows = _strip_times([dict(r) for r in rows])
    buf = io.StringIO()
    if args.format == "json-lines":
        for row in rows:
            record = {k: row.get(k, "") for k in fields}
            if section:
                record["section"] = section
            buf.write(json.dumps(record, sort_keys=True) + "\n")
    else:
        if not args.no_timestamp:
            buf.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
        if section:
            buf.write(f"# {section}\n")
        writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
    text = buf.getvalue()
    if args.out:
        mode = "a" if getattr(args, "_appending", False) else "w"
        with open(args.out, mode, encoding="utf-8") as fp:
            fp.write(text)
        args._appending = True
    else:
        sys.stdout.write(text)


def _cmd_gen(args):
    graph, (model, param) = _make_graph(args)
    comment = None if args.no_timestamp else f"{model} n={graph.n} param={param} seed={args.seed}"
    text = format_edge_list(graph, comment=comment)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_exact(args):
    graph, _ = _make_graph(args)
    if graph.n > SUBSET_DP_MAX_N:
        raise SizeLimitError(f"exact solver capped at n <= {SUBSET_DP_MAX_N}")
    value = exact_cutwidth_subset_dp(graph)
    print(value)
    return 0


def _cmd_lb(args):
    graph, (model, param) = _make_graph(args)
    report = _run_instance(graph, model, param, args.seed, args, with_ub=not args.no_ub)
    _emit(_iteration_rows(report), ITER_FIELDS, args, section="iterations")
    _emit([_summary_row(report, model, param, args.seed, graph.density())],
          SUMMARY_FIELDS, args, section="summary")
    return 0


def _cmd_ub(args):
    graph, (model, param) = _make_graph(args)
    report = _run_instance(graph, model, param, args.seed, args, with_ub=True)
    witness = " ".join(str(v) for v in report.ub_witness.order())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            fp.write(f"{report.ub}\n{witness}\n")
    else:
        print(report.ub)
        print(witness)
    return 0


def _bench_worker(task):
    """Run one bench instance; failures are reported, not raised, so the rows
    of completed instances still get flushed."""
    model, n, param, seed = task["model"], task["n"], task["param"], task["seed"]
    try:
        args = argparse.Namespace(**task["args"])
        if model == "er":
            graph = gen_erdos_renyi(n, param, seed)
        else:
            graph = gen_random_geometric(n, param, seed)
        report = _run_instance(graph, model, param, seed, args, with_ub=True)
        row = _summary_row(report, model, param, seed, graph.density())
        return task["index"], row, None
    except Exception as exc:  # noqa: BLE001 - worker boundary
        return task["index"], None, f"{model}({n},{param}) seed {seed}: {exc}"


def _cmd_bench(args):
    if bool(args.er) == bool(args.rgg):
        raise UsageError("bench needs exactly one of --er, --rgg")
    model = "er" if args.er else "rgg"
    ns, params = _parse_instance_arg(args.er or args.rgg, model)
    seeds = _parse_seeds(args.seeds)
    tasks = []
    plain_args = {k: v for k, v in vars(args).items()
                  if not k.startswith("_") and k != "func"}
    for n in ns:
        for param in params:
            for seed in seeds:
                tasks.append({
                    "index": len(tasks), "model": model, "n": n,
                    "param": param, "seed": seed, "args": plain_args,
                })
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_bench_worker, tasks))
    else:
        results = [_bench_worker(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    _emit([row for _, row, _ in results if row is not None],
          SUMMARY_FIELDS, args, section="summary")
    failures = [err for _, _, err in results if err]
    for err in failures:
        print(f"instance failed: {err}", file=sys.stderr)
    return 2 if failures else 0


def _cmd_trace(args):
    graph, (model, param) = _make_graph(args)
    args.improvement_min = float("-inf")  # run every iteration for the trace
    rows = []
    for schedule in ("dicycle", "triangle", "all"):
        report = _run_instance(graph, model, param, args.seed, args,
                               with_ub=False, schedule=schedule)
        alphas = [report.alpha_init] + [rec.alpha for rec in report.iterations]
        while len(alphas) < args.max_iter + 1:
            alphas.append(alphas[-1])
        for iteration, alpha in enumerate(alphas):
            rows.append({
                "schedule": schedule,
                "iteration": iteration,
                "alpha": f"{alpha:.6f}",
            })
    _emit(rows, ["schedule", "iteration", "alpha"], args, section="trace")
    return 0


def _add_common(parser, with_instance=True, with_driver=True):
    if with_instance:
        parser.add_argument("--graph", help="edge-list file")
        parser.add_argument("--er", help="Erdos-Renyi instance 'n,p'")
        parser.add_argument("--rgg", help="random geometric instance 'n,d'")
    parser.add_argument("--seed", type=int, default=0, help="master seed (64-bit)")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json-lines"), default="csv")
    parser.add_argument("--no-timestamp", action="store_true",
                        help="suppress the timestamp header and wall-clock columns")
    parser.add_argument("--verbose", action="store_true")
    if with_driver:
        parser.add_argument("--max-iter", type=int, default=7)
        parser.add_argument("--improvement-min", type=float, default=1e-2)
        parser.add_argument("--num-cuts", type=int, default=None,
                            help="cuts added per iteration (default 2 n^2)")
        parser.add_argument("--min-violation", type=float, default=1e-4)
        parser.add_argument("--time-limit-sec", type=float, default=None)
        parser.add_argument("--families", nargs="*", choices=list(cut_families.ALL_KINDS),
                            help="restrict the family universe")
        parser.add_argument("--schedule", choices=sorted(SCHEDULES), default="all")
        parser.add_argument("--tol-primal", type=float, default=1e-4)
        parser.add_argument("--tol-dual", type=float, default=1e-4)
        parser.add_argument("--tol-gap", type=float, default=3e-4)
        parser.add_argument("--solver-max-iter", type=int, default=4000)
        parser.add_argument("--ub-restarts", type=int, default=1,
                            help="independent annealing restarts for the upper bound")


def build_parser():
    parser = _Parser(prog="cutsdp", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    _add_common(p, with_driver=False)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("lb", help="cutting-plane lower bound")
    _add_common(p)
    p.add_argument("--no-ub", action="store_true", help="skip the upper-bound step")
    p.set_defaults(func=_cmd_lb)

    p = sub.add_parser("ub", help="upper bound with witness ordering")
    _add_common(p)
    p.set_defaults(func=_cmd_ub)

    p = sub.add_parser("exact", help="exact cutwidth (subset DP, n <= 24)")
    _add_common(p, with_driver=False)
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("bench", help="benchmark a grid of instances")
    _add_common(p)
    p.add_argument("--seeds", default="1", help="'1..5' or '1,4,9'")
    p.add_argument("--jobs", type=int, default=1, help="parallel instances")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("trace", help="bound trace per family schedule")
    _add_common(p)
    p.set_defaults(func=_cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SizeLimitError as exc:
        print(f"size cap: {exc}", file=sys.stderr)
        return 3
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        log.exception("run failed")
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
