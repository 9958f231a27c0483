"""Level-1 routines: vector-vector operations and reductions.

Required arguments follow Netlib order; element offsets and increments are
keyword-only with the usual defaults.  Reductions write their result into a
one-element output region when given and always return it; index reductions
return the zero-based index of the first extremum.
"""

from __future__ import annotations

import numpy as np

from ..core import Buffer, Context, Precision
from ..errors import UsageError
from ..kernels import ReduceArgs, VectorArgs, run_kernel
from .common import check_precision, get_store, scalar, vec

__all__ = [
    "axpy", "scal", "copy", "swap",
    "dot", "dotu", "dotc", "nrm2", "asum", "sum",
    "amax", "amin", "max", "min",
]

def _vector_config(ctx: Context, family: str, precision: Precision, n: int):
    store = get_store(ctx)
    cfg, _level = store.resolve(family, precision, ctx.device, (0, n, 0))
    return cfg


def _ranges_overlap(xb, xo, yb, yo, n, xi, yi) -> bool:
    if xb is not yb or n == 0:
        return False
    x_hi = xo + (n - 1) * abs(xi)
    y_hi = yo + (n - 1) * abs(yi)
    return not (x_hi < yo or y_hi < xo)


def axpy(ctx: Context, n: int, alpha, x: Buffer, y: Buffer, *,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1) -> None:
    """y += alpha * x."""
    precision = x.precision
    check_precision(ctx, precision, x, y)
    xs = vec(x, x_offset, n, x_inc)
    ys = vec(y, y_offset, n, y_inc)
    cfg = _vector_config(ctx, "axpy", precision, n)
    run_kernel("axpy", cfg,
               VectorArgs("axpy", n, scalar(alpha, precision), xs, ys), ctx, precision)


def scal(ctx: Context, n: int, alpha, x: Buffer, *,
         x_offset: int = 0, x_inc: int = 1) -> None:
    """x *= alpha."""
    precision = x.precision
    check_precision(ctx, precision, x)
    xs = vec(x, x_offset, n, x_inc)
    cfg = _vector_config(ctx, "axpy", precision, n)
    run_kernel("axpy", cfg, VectorArgs("scal", n, scalar(alpha, precision), xs), ctx, precision)


def copy(ctx: Context, n: int, x: Buffer, y: Buffer, *,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1) -> None:
    """y = x (distinct ranges required)."""
    precision = x.precision
    check_precision(ctx, precision, x, y)
    if _ranges_overlap(x, x_offset, y, y_offset, n, x_inc, y_inc):
        raise UsageError("copy requires non-overlapping x and y ranges")
    xs = vec(x, x_offset, n, x_inc)
    ys = vec(y, y_offset, n, y_inc)
    cfg = _vector_config(ctx, "axpy", precision, n)
    run_kernel("axpy", cfg, VectorArgs("copy", n, 0, xs, ys), ctx, precision)


def swap(ctx: Context, n: int, x: Buffer, y: Buffer, *,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1) -> None:
    """x <-> y (distinct ranges required)."""
    precision = x.precision
    check_precision(ctx, precision, x, y)
    if _ranges_overlap(x, x_offset, y, y_offset, n, x_inc, y_inc):
        raise UsageError("swap requires non-overlapping x and y ranges")
    xs = vec(x, x_offset, n, x_inc)
    ys = vec(y, y_offset, n, y_inc)
    cfg = _vector_config(ctx, "axpy", precision, n)
    run_kernel("axpy", cfg, VectorArgs("swap", n, 0, xs, ys), ctx, precision)


# ---------------------------------------------------------------------------
# Reductions
# ---------------------------------------------------------------------------

def _reduce(ctx: Context, kind: str, n: int, x: Buffer, x_offset, x_inc,
            y: Buffer | None = None, y_offset: int = 0, y_inc: int = 1,
            result: Buffer | None = None, result_offset: int = 0):
    precision = x.precision
    operands = (x,) if y is None else (x, y)
    check_precision(ctx, precision, *operands)
    if result is not None:
        ctx.check_owns(result)
        result.check_range(result_offset, 1)
        out = result.data[result_offset : result_offset + 1]
    else:
        out = np.zeros(1, dtype=precision.dtype)
    xs = vec(x, x_offset, n, x_inc)
    ys = vec(y, y_offset, n, y_inc) if y is not None else None
    cfg = _vector_config(ctx, "dot", precision, n)
    return run_kernel("dot", cfg, ReduceArgs(kind, n, xs, ys, out), ctx, precision)


def dot(ctx: Context, n: int, x: Buffer, y: Buffer, *,
        x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1,
        result: Buffer | None = None, result_offset: int = 0):
    """sum(x_i * y_i) for real precisions."""
    if x.precision.is_complex:
        raise UsageError("dot is real-only; use dotu or dotc for complex vectors")
    return _reduce(ctx, "dot", n, x, x_offset, x_inc, y, y_offset, y_inc,
                   result, result_offset)


def dotu(ctx: Context, n: int, x: Buffer, y: Buffer, *,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1,
         result: Buffer | None = None, result_offset: int = 0):
    """sum(x_i * y_i), complex, no conjugation."""
    if not x.precision.is_complex:
        raise UsageError("dotu is complex-only")
    return _reduce(ctx, "dotu", n, x, x_offset, x_inc, y, y_offset, y_inc,
                   result, result_offset)


def dotc(ctx: Context, n: int, x: Buffer, y: Buffer, *,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1,
         result: Buffer | None = None, result_offset: int = 0):
    """sum(conj(x_i) * y_i)."""
    if not x.precision.is_complex:
        raise UsageError("dotc is complex-only")
    return _reduce(ctx, "dotc", n, x, x_offset, x_inc, y, y_offset, y_inc,
                   result, result_offset)


def nrm2(ctx: Context, n: int, x: Buffer, *,
         x_offset: int = 0, x_inc: int = 1,
         result: Buffer | None = None, result_offset: int = 0):
    """Euclidean norm, computed with max-scaling for range safety."""
    return _reduce(ctx, "nrm2", n, x, x_offset, x_inc, result=result,
                   result_offset=result_offset)


def asum(ctx: Context, n: int, x: Buffer, *,
         x_offset: int = 0, x_inc: int = 1,
         result: Buffer | None = None, result_offset: int = 0):
    """Sum of absolute values (complex: |re| + |im| per element)."""
    return _reduce(ctx, "asum", n, x, x_offset, x_inc, result=result,
                   result_offset=result_offset)


def sum(ctx: Context, n: int, x: Buffer, *,
        x_offset: int = 0, x_inc: int = 1,
        result: Buffer | None = None, result_offset: int = 0):
    """Sum of signed values."""
    return _reduce(ctx, "sum", n, x, x_offset, x_inc, result=result,
                   result_offset=result_offset)


def _index_reduce(ctx, kind, n, x, x_offset, x_inc, result, result_offset):
    if n < 1:
        raise UsageError(f"{kind} requires n >= 1")
    return int(_reduce(ctx, kind, n, x, x_offset, x_inc, result=result,
                       result_offset=result_offset))


def amax(ctx: Context, n: int, x: Buffer, *,
         x_offset: int = 0, x_inc: int = 1,
         result: Buffer | None = None, result_offset: int = 0) -> int:
    """Index of the first element with maximal |x_i| (complex: |re|+|im|)."""
    return _index_reduce(ctx, "amax", n, x, x_offset, x_inc, result, result_offset)


def amin(ctx: Context, n: int, x: Buffer, *,
         x_offset: int = 0, x_inc: int = 1,
         result: Buffer | None = None, result_offset: int = 0) -> int:
    """Index of the first element with minimal |x_i|."""
    return _index_reduce(ctx, "amin", n, x, x_offset, x_inc, result, result_offset)


def max(ctx: Context, n: int, x: Buffer, *,
        x_offset: int = 0, x_inc: int = 1,
        result: Buffer | None = None, result_offset: int = 0) -> int:
    """Index of the first maximum value (real precisions)."""
    if x.precision.is_complex:
        raise UsageError("max is real-only")
    return _index_reduce(ctx, "max", n, x, x_offset, x_inc, result, result_offset)


def min(ctx: Context, n: int, x: Buffer, *,
        x_offset: int = 0, x_inc: int = 1,
        result: Buffer | None = None, result_offset: int = 0) -> int:
    """Index of the first minimum value (real precisions)."""
    if x.precision.is_complex:
        raise UsageError("min is real-only")
    return _index_reduce(ctx, "min", n, x, x_offset, x_inc, result, result_offset)
