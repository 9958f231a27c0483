"""Measurement-driven auto-tuning of the kernel families.

A tuning run explores the family's full curated configuration set plus a
user-sized random sample of the full grid (deduplicated, validity-filtered),
verifies each candidate's output against the naive reference once, then times
it with one warm-up and ten recorded runs by default.  Everything measured is
kept, not just the winner, so the results can feed the database's defaults
aggregation.
"""

from __future__ import annotations

import gc
import random
import time
from dataclasses import dataclass, field

import numpy as np

from .core import Context, DeviceSpec, Precision
from .errors import TuningError, UsageError
from .kernels import (
    Configuration,
    curated_configurations,
    validate_config,
    work_group_threads,
)
from .kernels.params import random_configuration
from .reference import (
    allclose_tol,
    gemm_tolerance,
    reduction_tolerance,
    ref_axpy,
    ref_dot,
    ref_gemm,
    ref_gemv,
    ref_ger,
)
from .tuningdb import DbEntry, DbKey

__all__ = ["TuningTask", "Measurement", "TuningRun", "measure", "tune", "best_config"]


@dataclass
class TuningTask:
    """What to tune: one kernel family at one precision and problem size."""

    kernel_family: str
    precision: Precision
    args: dict  # m / n / k as applicable
    device: DeviceSpec
    budget: int = 0
    seed: int = 0
    warmup_runs: int = 1
    timed_runs: int = 10

    def __post_init__(self):
        if self.timed_runs < 1:
            raise UsageError("timed_runs must be >= 1")
        if self.budget < 0:
            raise UsageError("budget must be >= 0")

    def sizes(self) -> tuple:
        return (
            int(self.args.get("m", 0)),
            int(self.args.get("n", 0)),
            int(self.args.get("k", 0)),
        )


@dataclass
class Measurement:
    """One explored configuration: timings when ok, violations otherwise."""

    configuration: Configuration
    status: str  # ok | invalid | failed
    per_run_times: list = field(default_factory=list)
    mean_time: float = float("inf")
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        doc = {
            "params": self.configuration.as_dict(),
            "per_run_times_s": list(self.per_run_times),
            "mean_time_s": self.mean_time if self.status == "ok" else None,
            "status": self.status,
        }
        if self.violations:
            doc["violations"] = list(self.violations)
        return doc


@dataclass
class TuningRun:
    """All measurements for one task plus the selected best configuration."""

    task: TuningTask
    measurements: list
    best: Configuration

    def to_db_entry(self) -> DbEntry:
        key = DbKey.for_task(self.task.kernel_family, self.task.precision,
                             self.task.device, self.task.sizes())
        return DbEntry(
            key=key,
            measurements=[m.to_json() for m in self.measurements],
            best=self.best,
        )

    def to_json(self) -> dict:
        return {
            "task": {
                "family": self.task.kernel_family,
                "precision": self.task.precision.value,
                "args": {k: int(v) for k, v in self.task.args.items()},
                "device": self.task.device.to_dict(),
                "budget": self.task.budget,
                "seed": self.task.seed,
                "warmup_runs": self.task.warmup_runs,
                "timed_runs": self.task.timed_runs,
            },
            "measurements": [m.to_json() for m in self.measurements],
            "best": self.best.as_dict(),
        }


class _KernelHarness:
    """Fixed inputs, a run closure, and an oracle check for one task."""

    def __init__(self, task: TuningTask, ctx: Context):
        from .kernels import (
            GemmIndirectArgs,
            GemvArgs,
            GerArgs,
            ReduceArgs,
            VectorArgs,
            GeneralAdapter,
            run_kernel,
        )
        from .kernels.transforms import run_transform

        self._run_kernel = run_kernel
        self._run_transform = run_transform
        self.task = task
        self.ctx = ctx
        precision = task.precision
        cdt = precision.compute_dtype
        rng = np.random.default_rng(12345)
        family = task.kernel_family
        m, n, k = task.sizes()

        def rand(*shape):
            data = rng.uniform(-1.0, 1.0, size=shape)
            if precision.is_complex:
                data = data + 1j * rng.uniform(-1.0, 1.0, size=shape)
            return data.astype(precision.dtype)

        if family in ("axpy", "dot"):
            if n < 1:
                raise UsageError(f"{family} tuning requires n >= 1")
            self.x = rand(n)
            self.y = rand(n)
            if family == "axpy":
                self.expected = ref_axpy(cdt.type(2), self.x, self.y, precision)
                self.tol = np.full(n, 4.0 * precision.eps * 2.0 *
                                   float(np.max(np.abs(self.x.astype(np.float64)))) + 1e-30)

                def run(cfg):
                    ys = self.y.copy()
                    run_kernel("axpy", cfg,
                               VectorArgs("axpy", n, cdt.type(2), self.x, ys),
                               ctx, precision)
                    return ys
            else:
                kind = "dotc" if precision.is_complex else "dot"
                if precision.is_complex:
                    ref = np.dot(np.conj(self.x.astype(cdt)), self.y.astype(cdt))
                else:
                    ref = ref_dot(self.x, self.y, precision)
                self.expected = np.asarray([precision.dtype.type(ref)])
                self.tol = reduction_tolerance(self.x, self.y, precision)

                def run(cfg):
                    out = np.zeros(1, dtype=precision.dtype)
                    run_kernel("dot", cfg,
                               ReduceArgs(kind, n, self.x, self.y, out), ctx, precision)
                    return out
        elif family == "gemv":
            if m < 1 or n < 1:
                raise UsageError("gemv tuning requires m, n >= 1")
            self.a = rand(m, n)
            self.x = rand(n)
            self.y = rand(m)
            self.expected = ref_gemv(cdt.type(1), self.a, self.x, cdt.type(0),
                                     self.y, precision)
            self.tol = gemm_tolerance(self.a, self.x[:, None], precision)[:, 0]

            def run(cfg):
                ys = self.y.copy()
                adapter = GeneralAdapter(self.a, cdt)
                run_kernel("gemv", cfg,
                           GemvArgs(m, adapter.rows, cdt.type(1), cdt.type(0),
                                    self.x.astype(cdt), ys),
                           ctx, precision)
                return ys
        elif family == "ger":
            if m < 1 or n < 1:
                raise UsageError("ger tuning requires m, n >= 1")
            self.a = rand(m, n)
            self.x = rand(m)
            self.y = rand(n)
            self.expected = ref_ger(cdt.type(1), self.x, self.y, self.a, precision)
            self.tol = 8.0 * precision.eps * np.abs(
                self.expected.astype(np.complex128)) + 1e-30

            def run(cfg):
                a = self.a.copy()
                run_kernel("ger", cfg,
                           GerArgs(m, n, cdt.type(1), self.x.astype(cdt),
                                   self.y.astype(cdt), a),
                           ctx, precision)
                return a
        elif family == "gemm":
            if m < 1 or n < 1 or k < 1:
                raise UsageError("gemm tuning requires m, n, k >= 1")
            self.a = rand(m, k)
            self.b = rand(k, n)
            self.c = rand(m, n)
            self.expected = ref_gemm(cdt.type(1), self.a, self.b, cdt.type(0),
                                     self.c, precision)
            self.tol = gemm_tolerance(self.a, self.b, precision)
            a_arr = np.ascontiguousarray(self.a, dtype=cdt)
            bt_arr = np.ascontiguousarray(self.b.T, dtype=cdt)

            def run(cfg):
                v = cfg.as_dict()
                mp = -(-m // v["MWG"]) * v["MWG"]
                np_ = -(-n // v["NWG"]) * v["NWG"]
                kp = -(-k // v["KWG"]) * v["KWG"]
                aw = np.zeros((mp, kp), dtype=cdt)
                aw[:m, :k] = a_arr
                btw = np.zeros((np_, kp), dtype=cdt)
                btw[:n, :k] = bt_arr
                cw = np.zeros((mp, np_), dtype=cdt)
                run_kernel("gemm", cfg,
                           GemmIndirectArgs(mp=mp, np_=np_, kp=kp,
                                            alpha=cdt.type(1), beta=cdt.type(0),
                                            a=aw, bt=btw, c=cw),
                           ctx, precision)
                return cw[:m, :n].astype(precision.dtype, copy=False)
        elif family == "transform":
            if m < 1 or n < 1:
                raise UsageError("transform tuning requires m, n >= 1")
            self.a = rand(m, n)
            self.expected = self.a.astype(cdt)
            self.tol = np.zeros((m, n))

            def run(cfg):
                dst = np.zeros((m, n), dtype=cdt)
                run_transform("copy_pad", self.a, dst, ctx, cfg, precision)
                return dst
        else:
            raise UsageError(f"unknown kernel family {family!r}")

        self.run = run

    def verify(self, cfg) -> bool:
        got = self.run(cfg)
        return allclose_tol(got, self.expected, self.tol, scale=1.0)


def measure(config: Configuration, task: TuningTask, ctx: Context,
            harness: _KernelHarness | None = None) -> Measurement:
    """Time one configuration: validity filter, oracle check, then timed runs."""
    verdict = validate_config(config, task.device, task.precision)
    if not verdict:
        return Measurement(config, "invalid", violations=verdict.violations)
    harness = harness or _KernelHarness(task, ctx)
    try:
        if not harness.verify(config):
            return Measurement(config, "failed")
    except Exception:
        return Measurement(config, "failed")

    times = []
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(task.warmup_runs):
            harness.run(config)
        for _ in range(task.timed_runs):
            t0 = time.perf_counter()
            harness.run(config)
            times.append(time.perf_counter() - t0)
    finally:
        if gc_was_enabled:
            gc.enable()
    return Measurement(config, "ok", per_run_times=times,
                       mean_time=float(np.mean(times)))


def tune(task: TuningTask, ctx: Context) -> TuningRun:
    """Explore curated + random configurations; return every measurement.

    The explored sequence is deterministic given the task seed.  Raises
    TuningError when no configuration is valid for the device.
    """
    if ctx.device != task.device:
        raise UsageError("tuning task device does not match the context device")
    harness = _KernelHarness(task, ctx)

    explored: list[Configuration] = []
    seen = set()
    for cfg in curated_configurations(task.kernel_family):
        if validate_config(cfg, task.device, task.precision) and cfg not in seen:
            explored.append(cfg)
            seen.add(cfg)

    rng = random.Random(task.seed)
    accepted = 0
    rejections = 0
    limit = 10 * task.budget
    while accepted < task.budget and rejections <= limit:
        cand = random_configuration(task.kernel_family, rng)
        if cand in seen or not validate_config(cand, task.device, task.precision):
            rejections += 1
            continue
        explored.append(cand)
        seen.add(cand)
        accepted += 1

    measurements = [measure(cfg, task, ctx, harness) for cfg in explored]
    ok = [m for m in measurements if m.status == "ok"]
    if not ok:
        raise TuningError(
            f"no valid configuration for device {task.device.name!r} "
            f"(family {task.kernel_family}, explored {len(explored)})"
        )
    run = TuningRun(task=task, measurements=measurements,
                    best=_select_best(ok))
    return run


def _select_best(ok_measurements) -> Configuration:
    def sort_key(meas: Measurement):
        return (meas.mean_time, work_group_threads(meas.configuration),
                meas.configuration.values)

    return min(ok_measurements, key=sort_key).configuration


def best_config(run: TuningRun) -> Configuration:
    """The ok measurement with minimal mean time (ties: fewer threads, then
    lexicographic parameter order)."""
    ok = [m for m in run.measurements if m.status == "ok"]
    if not ok:
        raise TuningError("tuning run has no ok measurements")
    return _select_best(ok)
