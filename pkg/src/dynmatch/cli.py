"""Command-line entry point.

Subcommands: ``gen`` (write a trace file), ``run`` (replay a trace and emit
a run report), ``verify`` (replay with per-step oracle checks), ``stats``
(epoch statistics, optionally with deep tracking), and ``bench`` (scaling
sweep against the naive baseline).

Exit codes: 0 success, 1 verification failure or internal assertion,
2 usage/input error.  Reports go to --report (default: stdout, or a file
under $DYNMATCH_REPORT_DIR when that is set) as JSON or key=value text.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .core import GraphError, InvariantError
from .engine import (CAPPED, UNCAPPED, EngineConfig, default_cap_sample_width,
                     default_level_cap)
from .instrumentation import report_kv_lines
from .runner import bench_sweep, run_trace, stats_for, verify_trace
from .workload import TraceError, decode, encode, generate

REPORT_DIR_ENV = "DYNMATCH_REPORT_DIR"


def _engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="engine RNG seed")
    p.add_argument("--mode", choices=[UNCAPPED, CAPPED], default=UNCAPPED)
    p.add_argument("--cap", type=int, default=None,
                   help="level cap (capped mode; default derived from t)")
    p.add_argument("--cap-sample-width", type=int, default=None,
                   help="at-cap sampling width (default derived from t)")


def _report_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--report", default=None, help="report output path")
    p.add_argument("--format", choices=["text", "json"], default="json")


def _config_for(args, t: int) -> EngineConfig:
    if args.mode == UNCAPPED:
        return EngineConfig(rng_seed=args.seed)
    cap = args.cap if args.cap is not None else default_level_cap(max(t, 1))
    width = (args.cap_sample_width if args.cap_sample_width is not None
             else default_cap_sample_width(max(t, 1)))
    return EngineConfig(mode=CAPPED, level_cap=cap, cap_sample_width=width,
                        rng_seed=args.seed)


def _load_trace(path: str):
    with open(path, encoding="ascii") as fh:
        return decode(fh.read())


def _emit(report: dict, args, default_name: str) -> None:
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        text = "\n".join(report_kv_lines(report)) + "\n"
    path = args.report
    if path is None and os.environ.get(REPORT_DIR_ENV):
        path = os.path.join(os.environ[REPORT_DIR_ENV], default_name)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def cmd_gen(args) -> int:
    trace = generate(args.kind, args.n, args.t, args.workload_seed,
                     p_delete=args.p_delete, hub_fraction=args.hub_fraction,
                     window=args.window, teardown=args.teardown)
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write(encode(trace))
    return 0


def cmd_run(args) -> int:
    trace = _load_trace(args.trace)
    config = _config_for(args, len(trace))
    try:
        _engine, report = run_trace(trace, config,
                                    deep_tracking=args.deep_tracking)
    except InvariantError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return 1
    _emit(report, args, "run.json")
    return 0


def cmd_verify(args) -> int:
    trace = _load_trace(args.trace)
    config = _config_for(args, len(trace))
    result = verify_trace(trace, config, check_every=args.check_every,
                          approx_every=args.approx_every)
    _emit(result.to_dict(), args, "verify.json")
    if not result.ok:
        print(f"verification failed at step {result.failed_step}: "
              f"{result.violation}", file=sys.stderr)
        return 1
    return 0


def cmd_stats(args) -> int:
    trace = _load_trace(args.trace)
    config = _config_for(args, len(trace))
    try:
        report = stats_for(trace, config, deep_tracking=args.deep_tracking)
    except InvariantError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return 1
    _emit(report, args, "stats.json")
    return 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = bench_sweep(sizes, args.t_multiplier, args.seeds, args.kind,
                       workload_seed_base=args.workload_seed,
                       engine_seed_base=args.seed,
                       p_delete=args.p_delete,
                       hub_fraction=args.hub_fraction)
    _emit({"rows": rows}, args, "bench.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="dynmatch")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a trace file")
    p.add_argument("--kind", choices=["random", "skew_star", "sliding_window"],
                   required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--p-delete", type=float, default=0.5)
    p.add_argument("--hub-fraction", type=float, default=0.05)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--workload-seed", type=int, default=0)
    p.add_argument("--teardown", action="store_true",
                   help="append deletions of all surviving edges")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="replay a trace and report metrics")
    p.add_argument("--trace", required=True)
    _engine_flags(p)
    p.add_argument("--deep-tracking", action="store_true")
    _report_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="replay with per-step oracle checks")
    p.add_argument("--trace", required=True)
    _engine_flags(p)
    p.add_argument("--check-every", type=int, default=1)
    p.add_argument("--approx-every", type=int, default=0,
                   help="run the exact-matching bound every N steps (0 = off)")
    _report_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="epoch statistics for one run")
    p.add_argument("--trace", required=True)
    _engine_flags(p)
    p.add_argument("--deep-tracking", action="store_true",
                   help="snapshot epochs for duration statistics (n <= 10^4)")
    _report_flags(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="scaling sweep vs the naive baseline")
    p.add_argument("--sizes", default="1024,8192,65536",
                   help="comma-separated ascending vertex counts")
    p.add_argument("--t-multiplier", type=int, default=20)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--kind", choices=["random", "skew_star"], default="random")
    p.add_argument("--p-delete", type=float, default=0.4)
    p.add_argument("--hub-fraction", type=float, default=1e-9)
    p.add_argument("--workload-seed", type=int, default=1000)
    p.add_argument("--seed", type=int, default=2000)
    _report_flags(p)
    p.set_defaults(func=cmd_bench)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TraceError, GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
