"""Command-line entry points: per-family tuners and the benchmark client."""

from __future__ import annotations

import argparse
import json

from .bench import heatmap_experiment, run_client, sweep_sizes, write_report
from .core import DeviceSpec, Precision, context_create, host_device
from .tuner import TuningTask, tune
from .tuningdb import Database, db_insert

_PRECISION_FLAGS = {
    "16": Precision.H,
    "32": Precision.S,
    "64": Precision.D,
    "3232": Precision.C,
    "6464": Precision.Z,
}


def _load_device(path: str | None) -> DeviceSpec:
    if path is None:
        return host_device()
    with open(path, encoding="utf-8") as fh:
        return DeviceSpec.from_dict(json.load(fh))


def _tuner_parser(family: str, needs_mk: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=f"Auto-tune the {family} kernel family")
    if needs_mk:
        p.add_argument("-m", type=int, default=1024)
        p.add_argument("-n", type=int, default=1024)
        p.add_argument("-k", type=int, default=1024)
    else:
        p.add_argument("-n", type=int, default=1 << 20)
    p.add_argument("--precision", choices=sorted(_PRECISION_FLAGS), default="32")
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--budget", type=int, default=0,
                   help="random samples beyond the curated set")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--device", metavar="PROFILE", default=None,
                   help="JSON device profile path (defaults to the host profile)")
    p.add_argument("--db", metavar="PATH", default=None,
                   help="tuning database to update with this run")
    p.add_argument("--json", metavar="PATH", default=None,
                   help="write the full tuning run as JSON")
    return p


_FAMILY_DIMS = {
    "axpy": False,
    "dot": False,
    "gemv": True,
    "ger": True,
    "gemm": True,
    "transform": True,
}


def tuner_main(family: str, argv=None) -> int:
    needs_mk = _FAMILY_DIMS[family]
    args = _tuner_parser(family, needs_mk).parse_args(argv)
    precision = _PRECISION_FLAGS[args.precision]
    device = _load_device(args.device)
    ctx = context_create(device)
    if needs_mk:
        sizes = {"m": args.m, "n": args.n, "k": args.k if family == "gemm" else 0}
    else:
        sizes = {"n": args.n}
    task = TuningTask(family, precision, sizes, device, budget=args.budget,
                      seed=args.seed, warmup_runs=args.warmup,
                      timed_runs=args.runs)
    run = tune(task, ctx)

    ok = [m for m in run.measurements if m.status == "ok"]
    print(f"explored {len(run.measurements)} configurations "
          f"({len(ok)} ok) for {family} {args.precision}")
    best = min(ok, key=lambda m: m.mean_time)
    print(f"best: {run.best}")
    print(f"best mean time: {best.mean_time * 1e3:.4f} ms over {len(best.per_run_times)} runs")

    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(run.to_json(), fh, indent=1)
    if args.db:
        try:
            db = Database.load(args.db)
        except FileNotFoundError:
            db = Database()
        db_insert(db, run)
        db.save(args.db)
    return 0


def tune_axpy_main():
    raise SystemExit(tuner_main("axpy"))


def tune_dot_main():
    raise SystemExit(tuner_main("dot"))


def tune_gemv_main():
    raise SystemExit(tuner_main("gemv"))


def tune_ger_main():
    raise SystemExit(tuner_main("ger"))


def tune_gemm_main():
    raise SystemExit(tuner_main("gemm"))


def tune_transform_main():
    raise SystemExit(tuner_main("transform"))


def client_main(argv=None) -> None:
    p = argparse.ArgumentParser(description="Benchmark tuned routines against the reference")
    p.add_argument("--routine", default="gemm", choices=["axpy", "gemv", "gemm"])
    p.add_argument("--precision", choices=sorted(_PRECISION_FLAGS), default="32")
    p.add_argument("--sweep", default="128,128,4",
                   help="start,step,count size progression")
    p.add_argument("--odd-step", type=int, default=None,
                   help="override the sweep step with an odd multiple (e.g. 129)")
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--device", metavar="PROFILE", default=None)
    p.add_argument("--db", metavar="PATH", default=None)
    p.add_argument("--out", metavar="CSV", default=None)
    p.add_argument("--json", metavar="JSON", default=None)
    p.add_argument("--heatmap", metavar="SIZES_JSON", default=None,
                   help="run the problem-specific-tuning heat map over the "
                        "size triples in this JSON file")
    p.add_argument("--budget", type=int, default=32,
                   help="tuner random budget for heat-map mode")
    p.add_argument("--seed", type=int, default=7)
    args = p.parse_args(argv)

    precision = _PRECISION_FLAGS[args.precision]
    device = _load_device(args.device)
    ctx = context_create(device)
    db = Database.load(args.db) if args.db else None

    if args.heatmap:
        with open(args.heatmap, encoding="utf-8") as fh:
            sizes = json.load(fh)
        result = heatmap_experiment(sizes, precision, ctx, budget=args.budget,
                                    seed=args.seed, warmup=args.warmup,
                                    runs=args.runs)
        print("relative performance (%, row = benched size, col = tuned-for size):")
        for i, row in enumerate(result.relative_perf):
            cells = " ".join(f"{v:7.1f}" for v in row)
            print(f"  {tuple(result.bench_sizes[i])}: {cells}")
        if args.out:
            import csv as _csv

            with open(args.out, "w", newline="", encoding="utf-8") as fh:
                writer = _csv.writer(fh)
                writer.writerow(["bench_size"] + [str(s) for s in result.tuned_sizes])
                for i, row in enumerate(result.relative_perf):
                    writer.writerow([str(result.bench_sizes[i])] + [f"{v:.2f}" for v in row])
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                json.dump(result.to_json(), fh, indent=1)
        raise SystemExit(0)

    start, step, count = (int(v) for v in args.sweep.split(","))
    if args.odd_step is not None:
        start, step = args.odd_step, args.odd_step
    sizes1d = sweep_sizes(start, step, count)
    if args.routine == "gemm":
        sizes = [(s, s, s) for s in sizes1d]
    elif args.routine == "gemv":
        sizes = [(s, s, 0) for s in sizes1d]
    else:
        sizes = [(0, s, 0) for s in sizes1d]
    rows = run_client(args.routine, sizes, precision, ctx, db,
                      warmup=args.warmup, runs=args.runs)
    for r in rows:
        status = "ok" if r.correct else "FAIL"
        print(f"{r.routine} {r.precision} size={r.size} "
              f"{r.metric_value:10.3f} {r.metric_kind}  "
              f"mean {r.mean_time * 1e3:9.4f} ms  ref {r.reference_mean_time * 1e3:9.4f} ms  "
              f"[{status}]")
    write_report(rows, args.out, args.json)
    raise SystemExit(0 if all(r.correct for r in rows) else 1)
