"""Benchmark clients: tuned-vs-reference timing, GB/s / GFLOPS, heat maps.

Each client run times the tuned routine and the naive reference with the same
protocol the tuner uses (one warm-up plus ten recorded runs by default),
verifies correctness against the reference, and reports a bandwidth or
throughput metric depending on the routine class.
"""

from __future__ import annotations

import csv
import gc
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .core import Context, Layout, Precision, Transpose, buffer_alloc
from .errors import ExperimentError, UsageError
from .reference import (
    allclose_tol,
    gemm_tolerance,
    ref_axpy,
    ref_gemm,
    ref_gemv,
)
from .routines import axpy, dot, gemm, gemv
from .routines.common import get_store
from .tuner import TuningTask, tune
from .tuningdb import Database

__all__ = [
    "BenchRow",
    "HeatmapResult",
    "metrics",
    "sweep_sizes",
    "run_client",
    "heatmap_experiment",
    "write_report",
]

#: metric kind and value formula per routine; level-1/2 report GB/s
#: (bandwidth-bound), level-3 GFLOPS (compute-bound).
METRIC_TABLE = {
    "axpy": ("GB/s", lambda m, n, k, es, cplx: 3 * n * es),
    "dot": ("GB/s", lambda m, n, k, es, cplx: 2 * n * es),
    "gemv": ("GB/s", lambda m, n, k, es, cplx: (m * n + m + 2 * n) * es),
    "gemm": ("GFLOPS", lambda m, n, k, es, cplx: (8 if cplx else 2) * m * n * k),
    "gemm_batched": ("GFLOPS", lambda m, n, k, es, cplx: (8 if cplx else 2) * m * n * k),
}


def metrics(routine: str, size, precision: Precision, seconds: float):
    """(value, kind) for one timed routine execution.

    GB/s counts bytes moved / 1e9 / s; GFLOPS counts floating-point
    operations (complex fused multiply-adds count as 8 real flops).
    """
    if seconds <= 0:
        raise UsageError("time must be > 0")
    if routine not in METRIC_TABLE:
        raise UsageError(f"no metric formula for routine {routine!r}")
    kind, formula = METRIC_TABLE[routine]
    m, n, k = (tuple(size) + (0, 0, 0))[:3]
    amount = formula(m, n, k, precision.elemsize, precision.is_complex)
    return amount / seconds / 1e9, kind


@dataclass
class BenchRow:
    """One benchmarked size: tuned and reference timings plus the metric."""

    routine: str
    precision: str
    size: tuple
    mean_time: float
    per_run_times: list
    metric_value: float
    metric_kind: str
    reference_mean_time: float
    reference_per_run_times: list
    correct: bool

    def to_json(self) -> dict:
        return {
            "routine": self.routine,
            "precision": self.precision,
            "size": {"m": self.size[0], "n": self.size[1], "k": self.size[2]},
            "mean_time_s": self.mean_time,
            "per_run_times_s": list(self.per_run_times),
            "metric_value": self.metric_value,
            "metric_kind": self.metric_kind,
            "reference_mean_time_s": self.reference_mean_time,
            "reference_per_run_times_s": list(self.reference_per_run_times),
            "correct": self.correct,
        }


CSV_HEADER = [
    "routine", "precision", "m", "n", "k", "mean_time_s", "metric_value",
    "metric_kind", "reference_mean_time_s", "correct",
]


@dataclass
class HeatmapResult:
    """Relative SGEMM performance across (benched size, tuned-for size) pairs."""

    tuned_sizes: list
    bench_sizes: list
    relative_perf: np.ndarray  # percent; row i benched at size i, col j params for size j
    times: np.ndarray = field(default=None)

    def to_json(self) -> dict:
        return {
            "tuned_sizes": [list(s) for s in self.tuned_sizes],
            "bench_sizes": [list(s) for s in self.bench_sizes],
            "relative_perf_percent": self.relative_perf.tolist(),
            "times_s": self.times.tolist() if self.times is not None else None,
        }


def sweep_sizes(start: int, step: int, count: int) -> list[int]:
    """Arithmetic size progression; covers both the power-of-2 and the
    odd-multiple experiments (e.g. step 128 vs step 129)."""
    if count < 1 or start < 1 or step < 0:
        raise UsageError("sweep requires start >= 1, step >= 0, count >= 1")
    return [start + i * step for i in range(count)]


def _timed(fn, warmup: int, runs: int) -> list[float]:
    times = []
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(warmup):
            fn()
        for _ in range(runs):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
    finally:
        if was_enabled:
            gc.enable()
    return times


class _ClientCase:
    """Buffers, tuned closure, reference closure, and oracle for one size."""

    def __init__(self, routine: str, size, precision: Precision, ctx: Context):
        rng = np.random.default_rng(98765)
        self.routine = routine
        self.precision = precision
        m, n, k = (tuple(size) + (0, 0, 0))[:3]
        self.size = (m, n, k)
        dt = precision.dtype
        cdt = precision.compute_dtype

        def rand(*shape):
            data = rng.uniform(-1.0, 1.0, size=shape)
            if precision.is_complex:
                data = data + 1j * rng.uniform(-1.0, 1.0, size=shape)
            return data.astype(dt)

        def to_buf(arr):
            buf = buffer_alloc(ctx, precision, arr.size)
            buf.data[:] = arr.reshape(-1, order="F")
            return buf

        if routine == "axpy":
            x = rand(n)
            y = rand(n)
            xb, yb = to_buf(x), to_buf(y)
            alpha = 1.5

            def tuned():
                axpy(ctx, n, alpha, xb, yb)

            def reference():
                self._ref_out = ref_axpy(cdt.type(alpha), x, yb.data, precision)

            self.expected_of = lambda: ref_axpy(cdt.type(alpha), x, y, precision)
            self.result_of = lambda: yb.data.copy()
            self.reset = lambda: yb.data.__setitem__(slice(None), y)
            self.tol = np.full(n, 4 * precision.eps * (1 + abs(alpha)) *
                               max(1.0, float(np.max(np.abs(x.astype(np.float64))))) + 1e-30)
        elif routine == "gemv":
            a = rand(m, n)
            x = rand(n)
            y = rand(m)
            ab, xb, yb = to_buf(a), to_buf(x), to_buf(y)

            def tuned():
                gemv(ctx, Layout.COL_MAJOR, Transpose.NO, m, n, 1.0, ab, xb, 0.0, yb)

            def reference():
                self._ref_out = ref_gemv(cdt.type(1), a, x, cdt.type(0), y, precision)

            self.expected_of = lambda: ref_gemv(cdt.type(1), a, x, cdt.type(0), y, precision)
            self.result_of = lambda: yb.data.copy()
            self.reset = lambda: None
            self.tol = gemm_tolerance(a, x[:, None], precision)[:, 0]
        elif routine == "gemm":
            a = rand(m, k)
            b = rand(k, n)
            c = rand(m, n)
            ab, bb, cb = to_buf(a), to_buf(b), to_buf(c)

            def tuned():
                gemm(ctx, Layout.COL_MAJOR, Transpose.NO, Transpose.NO,
                     m, n, k, 1.0, ab, bb, 0.0, cb)

            def reference():
                self._ref_out = ref_gemm(cdt.type(1), a, b, cdt.type(0), c, precision)

            self.expected_of = lambda: ref_gemm(cdt.type(1), a, b, cdt.type(0), c, precision)
            self.result_of = lambda: cb.data.reshape((n, m)).T.copy()
            self.reset = lambda: None
            self.tol = gemm_tolerance(a, b, precision)
        else:
            raise UsageError(f"client does not support routine {routine!r}")

        self.tuned = tuned
        self.reference = reference

    def verify(self) -> bool:
        self.tuned()
        ok = allclose_tol(self.result_of(), self.expected_of(), self.tol, scale=1.0)
        self.reset()
        return ok


def run_client(routine: str, sizes, precision: Precision, ctx: Context,
               db: Database | None = None, warmup: int = 1, runs: int = 10):
    """Benchmark ``routine`` over ``sizes``; returns the BenchRow list.

    Each size is verified against the reference before timing; failures are
    flagged on the row (callers decide the exit status).
    """
    if not sizes:
        raise UsageError("size sweep must be non-empty")
    if db is not None:
        get_store(ctx).database = db
    rows = []
    for size in sizes:
        case = _ClientCase(routine, size, precision, ctx)
        correct = case.verify()
        tuned_times = _timed(case.tuned, warmup, runs)
        case.reset()
        ref_times = _timed(case.reference, warmup, runs)
        mean = float(np.mean(tuned_times))
        value, kind = metrics(routine, case.size, precision, mean)
        rows.append(BenchRow(
            routine=routine,
            precision=precision.value,
            size=case.size,
            mean_time=mean,
            per_run_times=tuned_times,
            metric_value=value,
            metric_kind=kind,
            reference_mean_time=float(np.mean(ref_times)),
            reference_per_run_times=ref_times,
            correct=bool(correct),
        ))
    return rows


def write_report(rows, csv_path=None, json_path=None) -> None:
    """Write the CSV report and/or its JSON mirror."""
    if csv_path:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for r in rows:
                writer.writerow([
                    r.routine, r.precision, r.size[0], r.size[1], r.size[2],
                    f"{r.mean_time:.9g}", f"{r.metric_value:.6g}", r.metric_kind,
                    f"{r.reference_mean_time:.9g}", int(r.correct),
                ])
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump({"rows": [r.to_json() for r in rows]}, fh, indent=1)


def heatmap_experiment(sizes, precision: Precision, ctx: Context,
                       budget: int = 32, seed: int = 7, warmup: int = 1,
                       runs: int = 10) -> HeatmapResult:
    """Problem-specific-tuning heat map over ``sizes``.

    Tunes the matmul kernel once per size, then benchmarks every
    (benched size, tuned-for size) pair with the parameters installed as a
    runtime override.  All parameter sets for one benched size are timed
    back-to-back on the same buffers so host-state drift cancels out of the
    ratios.  relative_perf[i][j] = 100 * t(i, params_i) / t(i, params_j);
    the diagonal is 100 by construction.
    """
    sizes = [tuple(int(v) for v in s) for s in sizes]
    if len(set(sizes)) != len(sizes):
        raise UsageError("heat-map sizes must be distinct")
    store = get_store(ctx)
    best = {}
    for size in sizes:
        m, n, k = size
        task = TuningTask("gemm", precision, {"m": m, "n": n, "k": k},
                          ctx.device, budget=budget, seed=seed,
                          warmup_runs=warmup, timed_runs=runs)
        try:
            run = tune(task, ctx)
        except Exception as exc:
            raise ExperimentError(f"tuning failed for size {size}: {exc}") from exc
        best[size] = run.best

    count = len(sizes)
    times = np.zeros((count, count))
    for i, bench_size in enumerate(sizes):
        case = _ClientCase("gemm", bench_size, precision, ctx)

        def select(j):
            store.set_override("gemm", precision, ctx.device, bench_size,
                               best[sizes[j]])

        # verify + warm up every parameter set, then interleave the timed
        # runs round-robin so host-state drift cancels out of the ratios
        for j in range(count):
            select(j)
            if not case.verify():
                store.clear_overrides()
                raise ExperimentError(
                    f"correctness failure at size {bench_size} with "
                    f"parameters tuned for {sizes[j]}")
            for _ in range(warmup):
                case.tuned()
        per_run = np.zeros((count, runs))
        was_enabled = gc.isenabled()
        gc.disable()
        try:
            for r in range(runs):
                for j in range(count):
                    select(j)
                    t0 = time.perf_counter()
                    case.tuned()
                    per_run[j, r] = time.perf_counter() - t0
        finally:
            if was_enabled:
                gc.enable()
        times[i, :] = per_run.mean(axis=1)
        store.clear_overrides()

    rel = np.empty((count, count))
    for i in range(count):
        for j in range(count):
            rel[i, j] = 100.0 if i == j else 100.0 * times[i, i] / times[i, j]
    return HeatmapResult(tuned_sizes=sizes, bench_sizes=sizes,
                         relative_perf=rel, times=times)
