"""Numpy implementations of the five kernel families.

Every family decomposes its problem into work-groups whose element ownership
is disjoint, so scheduling order never changes results.  The tuning
parameters shape the decomposition (tile sizes, chunk sizes, staging copies),
which is what makes their host-side run times genuinely differ; arithmetic
runs in the precision's compute dtype with one rounding on store.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Context, Precision
from ..errors import UsageError
from .engine import launch, launch_grid
from .params import Configuration

__all__ = [
    "VectorArgs",
    "ReduceArgs",
    "GemvArgs",
    "GerArgs",
    "GemmIndirectArgs",
    "GemmDirectArgs",
    "run_kernel",
    "gemm_direct_tasks",
    "gemm_indirect_tasks",
]


@dataclass
class VectorArgs:
    """Elementwise kernel arguments; ``op`` is axpy/scal/copy/swap."""

    op: str
    n: int
    alpha: object
    x: np.ndarray
    y: np.ndarray | None = None


@dataclass
class ReduceArgs:
    """Reduction kernel arguments; ``out`` receives the (scalar) result."""

    kind: str
    n: int
    x: np.ndarray
    y: np.ndarray | None
    out: np.ndarray


@dataclass
class GemvArgs:
    """Matrix-vector arguments; ``rows`` materializes op(A) row panels."""

    m_out: int
    rows: object  # callable (r0, r1) -> 2-D compute-dtype panel
    alpha: object
    beta: object
    x: np.ndarray
    y: np.ndarray


@dataclass
class GerArgs:
    """Rank-1 update arguments (y is pre-conjugated by the caller if needed)."""

    m: int
    n: int
    alpha: object
    x: np.ndarray
    y: np.ndarray
    a: np.ndarray  # (m, n) storage view


@dataclass
class GemmIndirectArgs:
    """Tiled matmul on pre-padded workspaces: C = alpha*A@B + beta*C.

    ``a`` is (Mp, Kp) and ``bt`` is (Np, Kp) — B arrives transposed — both
    C-contiguous in the compute dtype; ``c`` is the (Mp, Np) output workspace.
    """

    mp: int
    np_: int
    kp: int
    alpha: object
    beta: object
    a: np.ndarray
    bt: np.ndarray
    c: np.ndarray


@dataclass
class GemmDirectArgs:
    """Bounds-checked matmul for arbitrary sizes, no pre-processing.

    ``a_get``/``bt_get`` materialize op(A)[r0:r1, :] and op(B).T[c0:c1, :]
    tiles in the compute dtype.
    """

    m: int
    n: int
    k: int
    alpha: object
    beta: object
    a_get: object  # callable (r0, r1) -> (r1-r0, k)
    bt_get: object  # callable (c0, c1) -> (c1-c0, k)
    c: np.ndarray  # (m, n) storage view


def run_kernel(family: str, config: Configuration, args, ctx: Context, precision: Precision):
    """Execute one kernel family with the given configuration."""
    if family == "axpy":
        return _run_elementwise(config, args, ctx, precision)
    if family == "dot":
        return _run_reduce(config, args, ctx, precision)
    if family == "gemv":
        return _run_gemv(config, args, ctx, precision)
    if family == "ger":
        return _run_ger(config, args, ctx, precision)
    if family == "gemm":
        return _run_gemm_indirect(config, args, ctx, precision)
    if family == "gemm_direct":
        return _run_gemm_direct(config, args, ctx, precision)
    raise UsageError(f"unknown kernel family {family!r}")


# ---------------------------------------------------------------------------
# Elementwise family (axpy / scal / copy / swap)
# ---------------------------------------------------------------------------

def _spans(n: int, span: int):
    for lo in range(0, n, span):
        yield lo, min(lo + span, n)


def _run_elementwise(config, args: VectorArgs, ctx, precision):
    v = config.as_dict()
    span = v["WGS"] * v["WPT"] * v["VW"]
    grid = launch_grid("axpy", (args.n,), config)
    cdt = precision.compute_dtype
    op, alpha, x, y = args.op, args.alpha, args.x, args.y
    needs_round = precision.dtype != cdt

    def make_task(lo, hi):
        if op == "axpy":
            def task():
                xs = x[lo:hi]
                ys = y[lo:hi]
                if needs_round:
                    ys[...] = (ys.astype(cdt) + alpha * xs.astype(cdt)).astype(precision.dtype)
                else:
                    ys += alpha * xs
        elif op == "scal":
            def task():
                xs = x[lo:hi]
                if needs_round:
                    xs[...] = (alpha * xs.astype(cdt)).astype(precision.dtype)
                else:
                    xs *= alpha
        elif op == "copy":
            def task():
                y[lo:hi] = x[lo:hi]
        elif op == "swap":
            def task():
                tmp = x[lo:hi].copy()
                x[lo:hi] = y[lo:hi]
                y[lo:hi] = tmp
        else:
            raise UsageError(f"unknown elementwise op {op!r}")
        return task

    tasks = [make_task(lo, hi) for lo, hi in _spans(args.n, span)]
    launch(ctx, "axpy", config, grid, tasks, precision)


# ---------------------------------------------------------------------------
# Reduction family
# ---------------------------------------------------------------------------

def _abs1(a: np.ndarray) -> np.ndarray:
    """|re| + |im| for complex, |x| otherwise (the BLAS index/sum metric)."""
    if np.iscomplexobj(a):
        return np.abs(a.real) + np.abs(a.imag)
    return np.abs(a)


def _run_reduce(config, args: ReduceArgs, ctx, precision):
    v = config.as_dict()
    span = v["WGS"] * v["WPT"] * v["VW"]
    kind, n, x, y = args.kind, args.n, args.x, args.y
    cdt = precision.compute_dtype
    grid = launch_grid("dot", (max(n, 1),), config)
    spans = list(_spans(n, span))

    if kind in ("amax", "amin", "max", "min"):
        if n < 1:
            raise UsageError(f"{kind} requires n >= 1")
        if kind in ("amax", "amin"):
            def keyfn(xs):
                return _abs1(xs)
        else:
            def keyfn(xs):
                return xs.real if np.iscomplexobj(xs) else xs

        pick_max = kind in ("amax", "max")

        def make_task(lo, hi):
            def task():
                keys = keyfn(x[lo:hi])
                i = int(np.argmax(keys) if pick_max else np.argmin(keys))
                return keys[i], lo + i
            return task

        results = launch(ctx, "dot", config, grid, [make_task(lo, hi) for lo, hi in spans],
                         precision)
        best_val, best_idx = results[0]
        for val, idx in results[1:]:
            if (val > best_val) if pick_max else (val < best_val):
                best_val, best_idx = val, idx
        args.out[...] = best_idx
        return best_idx

    if kind == "nrm2":
        # Two passes: a max-reduction for the scale, then scaled squares.
        def make_scale_task(lo, hi):
            def task():
                xs = x[lo:hi]
                return float(np.max(np.abs(xs))) if xs.size else 0.0
            return task

        scales = launch(ctx, "dot", config, grid,
                        [make_scale_task(lo, hi) for lo, hi in spans], precision)
        scale = max(scales) if scales else 0.0
        rdt = np.float64 if cdt in (np.dtype(np.float64), np.dtype(np.complex128)) else np.float32
        if scale == 0.0 or not np.isfinite(scale):
            args.out[...] = precision.dtype.type(scale)
            return scale

        def make_task(lo, hi):
            def task():
                xs = np.abs(x[lo:hi].astype(cdt)) / rdt(scale)
                return np.dot(xs, xs)
            return task

        partials = launch(ctx, "dot", config, grid,
                          [make_task(lo, hi) for lo, hi in spans], precision)
        total = np.sqrt(np.sum(np.asarray(partials, dtype=rdt))) * rdt(scale)
        args.out[...] = precision.dtype.type(total)
        return total

    def make_task(lo, hi):
        def task():
            xs = x[lo:hi].astype(cdt, copy=False)
            if kind in ("dot", "dotu"):
                return np.dot(xs, y[lo:hi].astype(cdt, copy=False))
            if kind == "dotc":
                return np.dot(np.conj(xs), y[lo:hi].astype(cdt, copy=False))
            if kind == "asum":
                return np.sum(_abs1(xs))
            if kind == "sum":
                return np.sum(xs)
            raise UsageError(f"unknown reduction kind {kind!r}")
        return task

    partials = launch(ctx, "dot", config, grid, [make_task(lo, hi) for lo, hi in spans],
                      precision)
    if kind == "asum" and precision.is_complex:
        acc_dt = np.dtype(np.float32) if cdt == np.dtype(np.complex64) else np.dtype(np.float64)
    else:
        acc_dt = cdt
    if partials:
        total = np.sum(np.asarray(partials, dtype=acc_dt))
    else:
        total = acc_dt.type(0)
    args.out[...] = total
    if precision.is_complex and kind != "asum":
        return complex(total)
    return float(np.real(total))


# ---------------------------------------------------------------------------
# Matrix-vector family
# ---------------------------------------------------------------------------

def _run_gemv(config, args: GemvArgs, ctx, precision):
    v = config.as_dict()
    wpr = v["WPR"]
    grid = launch_grid("gemv", (max(args.m_out, 1),), config)
    cdt = precision.compute_dtype
    alpha, beta = args.alpha, args.beta
    xs = args.x.astype(cdt, copy=False)

    def make_task(r0, r1):
        def task():
            panel = args.rows(r0, r1)
            acc = alpha * (panel @ xs)
            if beta != 0:
                acc = acc + beta * args.y[r0:r1].astype(cdt, copy=False)
            args.y[r0:r1] = acc.astype(precision.dtype, copy=False)
        return task

    tasks = [make_task(r0, r1) for r0, r1 in _spans(args.m_out, wpr)]
    launch(ctx, "gemv", config, grid, tasks, precision)


# ---------------------------------------------------------------------------
# Rank-1 family
# ---------------------------------------------------------------------------

def _run_ger(config, args: GerArgs, ctx, precision):
    v = config.as_dict()
    span = v["WGS"] * v["WPT"]
    grid = launch_grid("ger", (max(args.m, 1), args.n), config)
    cdt = precision.compute_dtype
    ys = args.y.astype(cdt, copy=False)

    def make_task(r0, r1):
        def task():
            block = args.a[r0:r1, :].astype(cdt, copy=False)
            update = block + args.alpha * np.outer(args.x[r0:r1].astype(cdt, copy=False), ys)
            args.a[r0:r1, :] = update.astype(precision.dtype, copy=False)
        return task

    tasks = [make_task(r0, r1) for r0, r1 in _spans(args.m, span)]
    launch(ctx, "ger", config, grid, tasks, precision)


# ---------------------------------------------------------------------------
# Tiled matrix-multiply (indirect: exact tile multiples, B pre-transposed)
# ---------------------------------------------------------------------------

def _round_robin(count: int, ways: int) -> np.ndarray:
    """Row permutation modelling strided (round-robin) cooperative loads."""
    return np.argsort(np.arange(count) % ways, kind="stable")


def _stage(tile: np.ndarray, nchunk: int, kwg: int, strided: bool, ways: int) -> np.ndarray:
    """Copy a (T, K) tile into 'local memory' as (nchunk, T, KWG) chunks.

    With strided access the copy walks rows in round-robin order, which costs
    extra gather work but leaves values unchanged.
    """
    t = tile.shape[0]
    if strided:
        perm = _round_robin(t, ways)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(t)
        staged = tile[perm][inv]
    else:
        staged = np.ascontiguousarray(tile)
    return np.ascontiguousarray(staged.reshape(t, nchunk, kwg).transpose(1, 0, 2))


def _tile_product(a_tile, bt_tile, kwg, kwi, sa, sb, strm, strn, mdima, ndimb):
    """One (T_m, T_n) output tile with the reduction tree fixed by the parameters.

    The k range splits into KWG chunks and KWI-wide slabs; slab products are
    summed within each chunk, then across chunks (pairwise in both stages).
    """
    tm, k = a_tile.shape
    tn = bt_tile.shape[0]
    nchunk = k // kwg
    ns = kwg // kwi
    if sa:
        a_c = _stage(a_tile, nchunk, kwg, strm == 1, mdima)
    else:
        a_c = a_tile.reshape(tm, nchunk, kwg).transpose(1, 0, 2)
    if sb:
        b_c = _stage(bt_tile, nchunk, kwg, strn == 1, ndimb)
    else:
        b_c = bt_tile.reshape(tn, nchunk, kwg).transpose(1, 0, 2)
    a_s = a_c.reshape(nchunk, tm, ns, kwi).transpose(0, 2, 1, 3)
    b_s = b_c.reshape(nchunk, tn, ns, kwi).transpose(0, 2, 3, 1)
    slabs = np.matmul(a_s, b_s)  # (nchunk, ns, tm, tn)
    return slabs.sum(axis=1).sum(axis=0)


def gemm_indirect_tasks(config, args: GemmIndirectArgs):
    """Work-group tasks and grid for one indirect-gemm instance.

    Shared between the plain routine and the batched routines so that the
    per-instance arithmetic is identical (bitwise) in both.
    """
    v = config.as_dict()
    mwg, nwg, kwg = v["MWG"], v["NWG"], v["KWG"]
    if args.mp % mwg or args.np_ % nwg or args.kp % kwg:
        raise UsageError(
            f"indirect gemm requires exact multiples: sizes ({args.mp}, {args.np_}, {args.kp}) "
            f"vs tiles ({mwg}, {nwg}, {kwg})"
        )
    grid = launch_grid("gemm", (args.mp, args.np_), config)
    alpha, beta = args.alpha, args.beta
    a, bt, c = args.a, args.bt, args.c

    def make_task(i0, j0):
        def task():
            acc = _tile_product(
                a[i0 : i0 + mwg], bt[j0 : j0 + nwg],
                kwg, v["KWI"], v["SA"], v["SB"], v["STRM"], v["STRN"],
                v["MDIMA"], v["NDIMB"],
            )
            out = c[i0 : i0 + mwg, j0 : j0 + nwg]
            if beta == 0:
                out[...] = alpha * acc
            else:
                out[...] = alpha * acc + beta * out
        return task

    tasks = [
        make_task(i0, j0)
        for i0 in range(0, args.mp, mwg)
        for j0 in range(0, args.np_, nwg)
    ]
    return tasks, grid


def _run_gemm_indirect(config, args: GemmIndirectArgs, ctx, precision):
    tasks, grid = gemm_indirect_tasks(config, args)
    launch(ctx, "gemm", config, grid, tasks, precision)


# ---------------------------------------------------------------------------
# Direct matrix-multiply (arbitrary sizes, bounds-checked tiles)
# ---------------------------------------------------------------------------

def gemm_direct_tasks(config, args: GemmDirectArgs, precision):
    """Work-group tasks and grid for one direct-gemm instance."""
    v = config.as_dict()
    mwg, nwg, kwg, kwi = v["MWG"], v["NWG"], v["KWG"], v["KWI"]
    m, n, k = args.m, args.n, args.k
    grid = launch_grid("gemm_direct", (max(m, 1), max(n, 1)), config)
    cdt = precision.compute_dtype
    alpha, beta = args.alpha, args.beta

    def make_task(i0, j0):
        i1 = min(i0 + mwg, m)
        j1 = min(j0 + nwg, n)

        def task():
            a_tile = args.a_get(i0, i1)
            b_tile = args.bt_get(j0, j1)
            acc = np.zeros((i1 - i0, j1 - j0), dtype=cdt)
            for k0 in range(0, k, kwg):
                k1 = min(k0 + kwg, k)
                if k1 - k0 == kwg and kwg % kwi == 0:
                    acc += _tile_product(
                        a_tile[:, k0:k1], b_tile[:, k0:k1],
                        kwg, kwi, 0, 0, 0, 0, v["MDIMA"], v["NDIMB"],
                    )
                else:
                    acc += a_tile[:, k0:k1] @ b_tile[:, k0:k1].T
            out = args.c[i0:i1, j0:j1]
            if beta == 0:
                out[...] = (alpha * acc).astype(precision.dtype, copy=False)
            else:
                prev = out.astype(cdt, copy=False)
                out[...] = (alpha * acc + beta * prev).astype(precision.dtype, copy=False)
        return task

    tasks = [
        make_task(i0, j0)
        for i0 in range(0, max(m, 0), mwg)
        for j0 in range(0, max(n, 0), nwg)
    ]
    return tasks, grid


def _run_gemm_direct(config, args: GemmDirectArgs, ctx, precision):
    tasks, grid = gemm_direct_tasks(config, args, precision)
    launch(ctx, "gemm_direct", config, grid, tasks, precision)
