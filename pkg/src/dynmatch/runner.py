"""Replay harnesses: verified runs, benchmark cells, and epoch statistics.

These drive the engine over workload traces and package the results as
plain dicts (JSON-compatible); the CLI is a thin argument layer on top.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .core import InvariantError
from .engine import CAPPED, EngineConfig, MatchingEngine
from .instrumentation import (NATURAL, deletion_times, duration_uniformity,
                              uninterrupted_duration)
from .oracle import (MAX_ORACLE_VERTICES, NaiveMaintainer, PlainGraph,
                     check_maximal, max_matching_size)
from .workload import INSERT, Trace, generate


def run_trace(trace: Trace, config: EngineConfig | None = None, *,
              deep_tracking: bool = False) -> tuple[MatchingEngine, dict]:
    """Apply a full trace; returns the engine and a run report."""
    t0 = time.perf_counter()
    engine = MatchingEngine(trace.n, config, deep_tracking=deep_tracking)
    engine.apply(trace)
    elapsed = time.perf_counter() - t0
    cfg = engine.config
    report = {
        "config": {
            "n": trace.n,
            "t": len(trace),
            "mode": cfg.mode,
            "level_cap": cfg.level_cap,
            "cap_sample_width": cfg.cap_sample_width,
            "rng_seed": cfg.rng_seed,
            "workload_seed": trace.seed,
            "deep_tracking": deep_tracking,
        },
        "metrics": engine.metrics.report(),
        "matching_size": engine.matching_size,
        "cover_size": 2 * engine.matching_size,
        "peak_level": engine.g.peak_level,
        "wall_clock": {
            "run_seconds": elapsed,
            "updates_per_second": len(trace) / elapsed if elapsed > 0 else 0.0,
        },
    }
    return engine, report


@dataclass
class VerifyResult:
    ok: bool
    steps: int = 0
    checks: int = 0
    approx_checks: int = 0
    space_checks: int = 0
    failed_step: int | None = None
    violation: str | None = None
    peak_level: int = 0
    cap_level_induced: int = 0
    max_approx_ratio: float = 0.0

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("ok", "steps", "checks", "approx_checks", "space_checks",
                 "failed_step", "violation", "peak_level",
                 "cap_level_induced", "max_approx_ratio")}


def verify_trace(trace: Trace, config: EngineConfig | None = None, *,
                 check_every: int = 1, approx_every: int = 0,
                 space_every: int = 100) -> VerifyResult:
    """Replay with per-step oracle checks; fails fast naming step and check.

    Every ``check_every`` steps the engine state passes the structural audit
    and the independent maximality check against a plainly replayed edge
    set.  Every ``space_every`` steps the linear-space identity is asserted.
    With ``approx_every`` > 0 (n <= 22 only) the brute-force maximum
    matching bounds the engine's matching within factor 2.
    """
    if approx_every and trace.n > MAX_ORACLE_VERTICES:
        raise ValueError(f"approximation checks need n <= {MAX_ORACLE_VERTICES}")
    engine = MatchingEngine(trace.n, config)
    plain = PlainGraph(trace.n)
    res = VerifyResult(ok=True)

    def fail(step: int, violation: str) -> VerifyResult:
        res.ok = False
        res.failed_step = step
        res.violation = violation
        return res

    for i, (op, u, v) in enumerate(trace):
        try:
            if op == INSERT:
                engine.handle_insert(u, v)
                plain.add(u, v)
            else:
                engine.handle_delete(u, v)
                plain.remove(u, v)
        except InvariantError as exc:
            return fail(i, f"engine assertion: {exc}")
        res.steps = i + 1
        if (i + 1) % check_every == 0:
            violations = engine.consistency_check()
            if violations:
                return fail(i, f"consistency: {violations[0]}")
            matching = engine.matched_edges()
            if not check_maximal(plain, matching):
                return fail(i, "oracle: matching not maximal")
            if len(matching) != engine.matching_size:
                return fail(i, "matching size counter out of sync")
            res.checks += 1
        if space_every and (i + 1) % space_every == 0:
            g = engine.g
            if g.stored_elements() != 2 * g.m:
                return fail(i, f"space: {g.stored_elements()} elements vs 2*{g.m}")
            if g.bucket_count() > g.m:
                return fail(i, f"space: {g.bucket_count()} buckets vs {g.m} edges")
            res.space_checks += 1
        if approx_every and (i + 1) % approx_every == 0:
            opt = max_matching_size(plain)
            if opt > 2 * engine.matching_size:
                return fail(i, f"approximation: optimum {opt} > 2*{engine.matching_size}")
            if engine.matching_size:
                ratio = opt / engine.matching_size
                if ratio > res.max_approx_ratio:
                    res.max_approx_ratio = ratio
            res.approx_checks += 1
    res.peak_level = engine.g.peak_level
    if engine.config.mode == CAPPED:
        cap = engine.config.level_cap
        res.cap_level_induced = sum(
            1 for rec in engine.metrics.epochs
            if rec.level == cap and rec.cause not in (None, NATURAL))
    return res


def bench_cell(kind: str, n: int, t: int, workload_seed: int, engine_seed: int,
               *, p_delete: float = 0.4, hub_fraction: float = 1e-9,
               config: EngineConfig | None = None) -> dict:
    """One benchmark cell: engine and naive baseline on the same teardown
    trace; work figures are elementary-operation counts, not wall time."""
    t_gen = time.perf_counter()
    if kind == "random":
        trace = generate("random", n, t, workload_seed, p_delete=p_delete,
                         teardown=True)
    elif kind == "skew_star":
        trace = generate("skew_star", n, t, workload_seed,
                         hub_fraction=hub_fraction, teardown=True)
    else:
        trace = generate(kind, n, t, workload_seed, teardown=True)
    t_gen = time.perf_counter() - t_gen
    total = len(trace)

    cfg = config or EngineConfig(rng_seed=engine_seed)
    t_run = time.perf_counter()
    engine = MatchingEngine(n, cfg)
    engine.apply(trace)
    t_run = time.perf_counter() - t_run

    t_naive = time.perf_counter()
    naive = NaiveMaintainer(n)
    naive.apply(trace)
    t_naive = time.perf_counter() - t_naive

    mx = engine.metrics
    return {
        "kind": kind,
        "n": n,
        "t": total,
        "workload_seed": workload_seed,
        "engine_seed": engine_seed,
        "engine_work_per_update": mx.work / total,
        "engine_scans_per_update": mx.scans / total,
        "naive_work_per_update": naive.work / total,
        "naive_scans_per_update": naive.scans / total,
        "max_charge_ratio": mx.max_charge_ratio(),
        "max_recursive_ratio": mx.max_recursive_ratio(),
        "peak_level": engine.g.peak_level,
        "epochs_created": len(mx.epochs),
        "wall_clock": {
            "gen_seconds": t_gen,
            "engine_seconds": t_run,
            "engine_wall_per_update": t_run / total,
            "naive_seconds": t_naive,
        },
    }


def bench_sweep(sizes: list[int], t_multiplier: int, seeds: int, kind: str,
                *, workload_seed_base: int = 1000, engine_seed_base: int = 2000,
                p_delete: float = 0.4, hub_fraction: float = 1e-9) -> list[dict]:
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    rows = []
    for n in sizes:
        for s in range(seeds):
            rows.append(bench_cell(kind, n, t_multiplier * n,
                                   workload_seed_base + s, engine_seed_base + s,
                                   p_delete=p_delete, hub_fraction=hub_fraction))
    return rows


def duration_samples(engine: MatchingEngine, *, min_level: int = 1,
                     natural_only: bool = True) -> list[tuple[int, int]]:
    """(uninterrupted duration, snapshot size) pairs for qualifying epochs."""
    times = deletion_times(engine.metrics.deletion_log)
    samples = []
    for rec in engine.metrics.epochs:
        if rec.level < min_level or rec.snapshot_out is None:
            continue
        if natural_only and rec.cause != NATURAL:
            continue
        if not rec.snapshot_out:
            continue
        samples.append((uninterrupted_duration(rec, times), len(rec.snapshot_out)))
    return samples


def stats_for(trace: Trace, config: EngineConfig | None = None, *,
              deep_tracking: bool = True, bins: int = 10) -> dict:
    """Epoch statistics for one run: per-level counts, per-epoch work ratios,
    and (with deep tracking) the duration-uniformity fit."""
    engine, report = run_trace(trace, config, deep_tracking=deep_tracking)
    mx = engine.metrics
    ratios = [rec.charged_work / (3 ** rec.level) for rec in mx.epochs
              if rec.cause is not None]
    out = {
        "config": report["config"],
        "metrics": report["metrics"],
        "epochs": {
            "created_by_level": report["metrics"]["epochs_created_by_level"],
            "terminated_by_level": report["metrics"]["epochs_terminated_by_level"],
            "work_ratio_max": max(ratios) if ratios else 0.0,
            "work_ratio_mean": sum(ratios) / len(ratios) if ratios else 0.0,
        },
        "wall_clock": report["wall_clock"],
    }
    if deep_tracking:
        samples = duration_samples(engine)
        fit = duration_uniformity(samples, bins=bins) if samples else {
            "samples": 0, "bins": bins, "observed": [], "expected": [],
            "statistic": 0.0, "p_value": 1.0}
        out["duration_uniformity"] = fit
    return out
