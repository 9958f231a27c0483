"""Shared argument handling for the routine layer.

All routines canonicalize to column-major internally.  A row-major matrix is
the transpose of the same bytes read column-major, so layout handling reduces
to wrapping the storage view in a transpose and, for the structured variants,
flipping the storage triangle and carrying a conjugation flag.
"""

from __future__ import annotations

import numpy as np

from ..core import (
    Buffer,
    Context,
    Layout,
    Precision,
    Transpose,
    Triangle,
    matrix_view,
    vector_view,
)
from ..errors import UsageError
from ..tuningdb import ParameterStore

__all__ = [
    "get_store",
    "check_precision",
    "vec",
    "mat",
    "scalar",
    "op_dims",
    "flip_triangle",
    "compose_op",
]


def get_store(ctx: Context) -> ParameterStore:
    """The context's parameter-resolution store (created on first use)."""
    store = getattr(ctx, "params", None)
    if store is None:
        store = ParameterStore()
        ctx.params = store
    return store


def check_precision(ctx: Context, precision: Precision, *bufs: Buffer) -> None:
    ctx.check_owns(*bufs)
    for i, buf in enumerate(bufs):
        if buf.precision is not precision:
            raise UsageError(
                f"operand {i} has precision {buf.precision.value}, expected {precision.value}"
            )


def vec(buf: Buffer, offset: int, n: int, inc: int) -> np.ndarray:
    return vector_view(buf, offset, n, inc)


def mat(buf: Buffer, offset: int, rows: int, cols: int, ld: int,
        layout: Layout = Layout.COL_MAJOR) -> np.ndarray:
    """Logical (rows, cols) matrix view regardless of storage layout."""
    if layout is Layout.COL_MAJOR:
        return matrix_view(buf, offset, rows, cols, ld)
    return matrix_view(buf, offset, cols, rows, ld).T


def scalar(value, precision: Precision):
    """Coerce a routine scalar to the precision's compute dtype."""
    if precision.is_complex:
        return precision.compute_dtype.type(complex(value))
    if isinstance(value, complex):
        if value.imag != 0:
            raise UsageError("complex scalar passed to a real-precision routine")
        value = value.real
    return precision.compute_dtype.type(value)


def op_dims(trans: Transpose, rows: int, cols: int) -> tuple[int, int]:
    """Dimensions of op(A) given the stored dimensions of A."""
    if trans is Transpose.NO:
        return rows, cols
    return cols, rows


def flip_triangle(triangle: Triangle) -> Triangle:
    return Triangle.LOWER if triangle is Triangle.UPPER else Triangle.UPPER


def compose_op(layout: Layout, trans: Transpose) -> tuple[Transpose, bool]:
    """Fold a row-major layout into (transpose tag, extra-conjugation flag).

    Row-major storage is read as the transposed column-major matrix, so the
    user's transpose flag flips; a conjugate-transpose leaves a plain
    conjugation behind, returned separately.
    """
    if layout is Layout.COL_MAJOR:
        return trans, False
    if trans is Transpose.NO:
        return Transpose.YES, False
    if trans is Transpose.YES:
        return Transpose.NO, False
    return Transpose.NO, True
