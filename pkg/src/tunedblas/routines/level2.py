"""Level-2 routines: matrix-vector products, triangular solves, rank updates.

Every matrix-vector variant runs the same gemv kernel; only the access
adapter differs (dense, banded, packed, symmetric, hermitian, triangular).
Row-major storage folds into the adapter as a transpose plus an optional
conjugation, with the stored triangle flipped for the structured kinds.
"""

from __future__ import annotations

import numpy as np

from ..core import (
    Buffer,
    Context,
    Diagonal,
    Layout,
    Transpose,
    Triangle,
    matrix_view,
)
from ..errors import SingularMatrixError, UsageError
from ..kernels import (
    BandAdapter,
    GemvArgs,
    GeneralAdapter,
    GerArgs,
    SymmetricAdapter,
    SymmetricBandAdapter,
    SymmetricPackedAdapter,
    TriangularAdapter,
    TriangularBandAdapter,
    TriangularPackedAdapter,
    run_kernel,
)
from ..kernels.adapters import packed_index
from .common import (
    check_precision,
    compose_op,
    flip_triangle,
    get_store,
    mat,
    op_dims,
    scalar,
    vec,
)

__all__ = [
    "gemv", "gbmv", "hbmv", "hemv", "hpmv", "sbmv", "spmv", "symv",
    "tbmv", "tpmv", "trmv", "trsv",
    "ger", "gerc", "geru", "her", "her2", "hpr", "hpr2",
    "spr", "spr2", "syr", "syr2",
]


def _run_matvec(ctx, precision, adapter, n_in, m_out, alpha, x, beta, y):
    """Shared gemv-kernel dispatch (alpha*op(A)x + beta*y into y)."""
    store = get_store(ctx)
    cfg, _ = store.resolve("gemv", precision, ctx.device, (m_out, n_in, 0))
    xs = x.astype(precision.compute_dtype, copy=False)
    args = GemvArgs(
        m_out=m_out,
        rows=adapter.rows,
        alpha=alpha,
        beta=beta,
        x=xs,
        y=y,
    )
    run_kernel("gemv", cfg, args, ctx, precision)


# ---------------------------------------------------------------------------
# General and banded matrix-vector
# ---------------------------------------------------------------------------

def gemv(ctx: Context, layout: Layout, trans: Transpose, m: int, n: int, alpha,
         a: Buffer, x: Buffer, beta, y: Buffer, *,
         a_offset: int = 0, lda: int | None = None,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1) -> None:
    """y = alpha * op(A) x + beta * y with A a dense m x n matrix."""
    precision = a.precision
    check_precision(ctx, precision, a, x, y)
    if m < 0 or n < 0:
        raise UsageError("gemv dimensions must be >= 0")
    lda = lda if lda is not None else (m if layout is Layout.COL_MAJOR else n)
    av = mat(a, a_offset, m, n, lda, layout)
    m_out, n_in = op_dims(trans, m, n)
    if m_out == 0:
        return
    adapter = GeneralAdapter(av, precision.compute_dtype, trans)
    xs = vec(x, x_offset, n_in, x_inc)
    ys = vec(y, y_offset, m_out, y_inc)
    _run_matvec(ctx, precision, adapter, n_in, m_out,
                scalar(alpha, precision), xs, scalar(beta, precision), ys)


def gbmv(ctx: Context, layout: Layout, trans: Transpose, m: int, n: int,
         kl: int, ku: int, alpha, a: Buffer, x: Buffer, beta, y: Buffer, *,
         a_offset: int = 0, lda: int | None = None,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1) -> None:
    """Banded gemv: A has kl sub- and ku super-diagonals in band storage."""
    precision = a.precision
    check_precision(ctx, precision, a, x, y)
    if kl < 0 or ku < 0 or kl >= max(m, 1) or ku >= max(n, 1):
        raise UsageError("band widths must satisfy 0 <= kl < m and 0 <= ku < n")
    lda = lda if lda is not None else kl + ku + 1
    band = matrix_view(a, a_offset, kl + ku + 1, n if layout is Layout.COL_MAJOR else m, lda)
    if layout is Layout.COL_MAJOR:
        adapter = BandAdapter(band, m, n, kl, ku, precision.compute_dtype, trans)
    else:
        # The row-major band bytes are the column-major band of A^T with the
        # band widths swapped; compose_op folds that into the transpose tag.
        eff, conj = compose_op(layout, trans)
        adapter = BandAdapter(band, n, m, ku, kl, precision.compute_dtype, eff)
        adapter.conj = conj
    m_out, n_in = op_dims(trans, m, n)
    if m_out == 0:
        return
    xs = vec(x, x_offset, n_in, x_inc)
    ys = vec(y, y_offset, m_out, y_inc)
    _run_matvec(ctx, precision, adapter, n_in, m_out,
                scalar(alpha, precision), xs, scalar(beta, precision), ys)


# ---------------------------------------------------------------------------
# Symmetric / hermitian matrix-vector
# ---------------------------------------------------------------------------

def _symmetric_adapter(layout, triangle, n, a, a_offset, lda, precision,
                       hermitian: bool):
    lda = lda if lda is not None else n
    av = matrix_view(a, a_offset, n, n, lda)
    tri = triangle if layout is Layout.COL_MAJOR else flip_triangle(triangle)
    adapter = SymmetricAdapter(av, tri, precision.compute_dtype, hermitian=hermitian)
    # Row-major hermitian bytes hold the conjugate of the logical matrix.
    adapter.conj = hermitian and layout is Layout.ROW_MAJOR
    return adapter


def symv(ctx: Context, layout: Layout, triangle: Triangle, n: int, alpha,
         a: Buffer, x: Buffer, beta, y: Buffer, *,
         a_offset: int = 0, lda: int | None = None,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1) -> None:
    """Symmetric gemv (real precisions)."""
    precision = a.precision
    if precision.is_complex:
        raise UsageError("symv is real-only; use hemv")
    check_precision(ctx, precision, a, x, y)
    if n == 0:
        return
    adapter = _symmetric_adapter(layout, triangle, n, a, a_offset, lda, precision, False)
    xs = vec(x, x_offset, n, x_inc)
    ys = vec(y, y_offset, n, y_inc)
    _run_matvec(ctx, precision, adapter, n, n,
                scalar(alpha, precision), xs, scalar(beta, precision), ys)


def hemv(ctx: Context, layout: Layout, triangle: Triangle, n: int, alpha,
         a: Buffer, x: Buffer, beta, y: Buffer, *,
         a_offset: int = 0, lda: int | None = None,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1) -> None:
    """Hermitian gemv (complex precisions)."""
    precision = a.precision
    if not precision.is_complex:
        raise UsageError("hemv is complex-only; use symv")
    check_precision(ctx, precision, a, x, y)
    if n == 0:
        return
    adapter = _symmetric_adapter(layout, triangle, n, a, a_offset, lda, precision, True)
    xs = vec(x, x_offset, n, x_inc)
    ys = vec(y, y_offset, n, y_inc)
    _run_matvec(ctx, precision, adapter, n, n,
                scalar(alpha, precision), xs, scalar(beta, precision), ys)


def _band_sym_adapter(layout, triangle, n, k, a, a_offset, lda, precision, hermitian):
    if k < 0 or k >= max(n, 1):
        raise UsageError("band width must satisfy 0 <= k < n")
    lda = lda if lda is not None else k + 1
    band = matrix_view(a, a_offset, k + 1, n, lda)
    tri = triangle if layout is Layout.COL_MAJOR else flip_triangle(triangle)
    adapter = SymmetricBandAdapter(band, n, k, tri, precision.compute_dtype,
                                   hermitian=hermitian)
    adapter.conj = hermitian and layout is Layout.ROW_MAJOR
    return adapter


def sbmv(ctx: Context, layout: Layout, triangle: Triangle, n: int, k: int, alpha,
         a: Buffer, x: Buffer, beta, y: Buffer, *,
         a_offset: int = 0, lda: int | None = None,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1) -> None:
    """Symmetric banded gemv (real precisions)."""
    precision = a.precision
    if precision.is_complex:
        raise UsageError("sbmv is real-only; use hbmv")
    check_precision(ctx, precision, a, x, y)
    if n == 0:
        return
    adapter = _band_sym_adapter(layout, triangle, n, k, a, a_offset, lda, precision, False)
    _run_matvec(ctx, precision, adapter, n, n, scalar(alpha, precision),
                vec(x, x_offset, n, x_inc), scalar(beta, precision),
                vec(y, y_offset, n, y_inc))


def hbmv(ctx: Context, layout: Layout, triangle: Triangle, n: int, k: int, alpha,
         a: Buffer, x: Buffer, beta, y: Buffer, *,
         a_offset: int = 0, lda: int | None = None,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1) -> None:
    """Hermitian banded gemv (complex precisions)."""
    precision = a.precision
    if not precision.is_complex:
        raise UsageError("hbmv is complex-only; use sbmv")
    check_precision(ctx, precision, a, x, y)
    if n == 0:
        return
    adapter = _band_sym_adapter(layout, triangle, n, k, a, a_offset, lda, precision, True)
    _run_matvec(ctx, precision, adapter, n, n, scalar(alpha, precision),
                vec(x, x_offset, n, x_inc), scalar(beta, precision),
                vec(y, y_offset, n, y_inc))


def _packed_sym_adapter(layout, triangle, n, ap, ap_offset, precision, hermitian):
    packed = vec(ap, ap_offset, n * (n + 1) // 2, 1)
    tri = triangle if layout is Layout.COL_MAJOR else flip_triangle(triangle)
    adapter = SymmetricPackedAdapter(packed, n, tri, precision.compute_dtype,
                                     hermitian=hermitian)
    adapter.conj = hermitian and layout is Layout.ROW_MAJOR
    return adapter


def spmv(ctx: Context, layout: Layout, triangle: Triangle, n: int, alpha,
         ap: Buffer, x: Buffer, beta, y: Buffer, *,
         ap_offset: int = 0,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1) -> None:
    """Symmetric packed gemv (real precisions)."""
    precision = ap.precision
    if precision.is_complex:
        raise UsageError("spmv is real-only; use hpmv")
    check_precision(ctx, precision, ap, x, y)
    if n == 0:
        return
    adapter = _packed_sym_adapter(layout, triangle, n, ap, ap_offset, precision, False)
    _run_matvec(ctx, precision, adapter, n, n, scalar(alpha, precision),
                vec(x, x_offset, n, x_inc), scalar(beta, precision),
                vec(y, y_offset, n, y_inc))


def hpmv(ctx: Context, layout: Layout, triangle: Triangle, n: int, alpha,
         ap: Buffer, x: Buffer, beta, y: Buffer, *,
         ap_offset: int = 0,
         x_offset: int = 0, x_inc: int = 1, y_offset: int = 0, y_inc: int = 1) -> None:
    """Hermitian packed gemv (complex precisions)."""
    precision = ap.precision
    if not precision.is_complex:
        raise UsageError("hpmv is complex-only; use spmv")
    check_precision(ctx, precision, ap, x, y)
    if n == 0:
        return
    adapter = _packed_sym_adapter(layout, triangle, n, ap, ap_offset, precision, True)
    _run_matvec(ctx, precision, adapter, n, n, scalar(alpha, precision),
                vec(x, x_offset, n, x_inc), scalar(beta, precision),
                vec(y, y_offset, n, y_inc))


# ---------------------------------------------------------------------------
# Triangular matrix-vector and solve
# ---------------------------------------------------------------------------

def _triangular_adapter(layout, triangle, trans, diagonal, n, storage, precision,
                        kind: str, k: int = 0):
    """Adapter for op(A) with A triangular in dense/band/packed storage."""
    eff_trans, conj = compose_op(layout, trans)
    tri = triangle if layout is Layout.COL_MAJOR else flip_triangle(triangle)
    cdt = precision.compute_dtype
    if kind == "dense":
        adapter = TriangularAdapter(storage, tri, diagonal, cdt, eff_trans)
    elif kind == "band":
        adapter = TriangularBandAdapter(storage, n, k, tri, diagonal, cdt, eff_trans)
    else:
        adapter = TriangularPackedAdapter(storage, n, tri, diagonal, cdt, eff_trans)
    adapter.conj = conj
    return adapter


def _trmv_common(ctx, precision, adapter, n, x, x_offset, x_inc):
    """x = op(A) x via the gemv kernel (alpha=1, beta=0, snapshot of x)."""
    xs = vec(x, x_offset, n, x_inc)
    x_in = xs.copy()
    _run_matvec(ctx, precision, adapter, n, n, scalar(1, precision), x_in,
                scalar(0, precision), xs)


def trmv(ctx: Context, layout: Layout, triangle: Triangle, trans: Transpose,
         diagonal: Diagonal, n: int, a: Buffer, x: Buffer, *,
         a_offset: int = 0, lda: int | None = None,
         x_offset: int = 0, x_inc: int = 1) -> None:
    """x = op(A) x with A triangular."""
    precision = a.precision
    check_precision(ctx, precision, a, x)
    if n == 0:
        return
    lda = lda if lda is not None else n
    av = matrix_view(a, a_offset, n, n, lda)
    adapter = _triangular_adapter(layout, triangle, trans, diagonal, n, av,
                                  precision, "dense")
    _trmv_common(ctx, precision, adapter, n, x, x_offset, x_inc)


def tbmv(ctx: Context, layout: Layout, triangle: Triangle, trans: Transpose,
         diagonal: Diagonal, n: int, k: int, a: Buffer, x: Buffer, *,
         a_offset: int = 0, lda: int | None = None,
         x_offset: int = 0, x_inc: int = 1) -> None:
    """x = op(A) x with A triangular banded (k off-diagonals)."""
    precision = a.precision
    check_precision(ctx, precision, a, x)
    if k < 0 or k >= max(n, 1):
        raise UsageError("band width must satisfy 0 <= k < n")
    if n == 0:
        return
    lda = lda if lda is not None else k + 1
    band = matrix_view(a, a_offset, k + 1, n, lda)
    adapter = _triangular_adapter(layout, triangle, trans, diagonal, n, band,
                                  precision, "band", k)
    _trmv_common(ctx, precision, adapter, n, x, x_offset, x_inc)


def tpmv(ctx: Context, layout: Layout, triangle: Triangle, trans: Transpose,
         diagonal: Diagonal, n: int, ap: Buffer, x: Buffer, *,
         ap_offset: int = 0, x_offset: int = 0, x_inc: int = 1) -> None:
    """x = op(A) x with A triangular packed."""
    precision = ap.precision
    check_precision(ctx, precision, ap, x)
    if n == 0:
        return
    packed = vec(ap, ap_offset, n * (n + 1) // 2, 1)
    adapter = _triangular_adapter(layout, triangle, trans, diagonal, n, packed,
                                  precision, "packed")
    _trmv_common(ctx, precision, adapter, n, x, x_offset, x_inc)


def trsv(ctx: Context, layout: Layout, triangle: Triangle, trans: Transpose,
         diagonal: Diagonal, n: int, a: Buffer, x: Buffer, *,
         a_offset: int = 0, lda: int | None = None,
         x_offset: int = 0, x_inc: int = 1) -> None:
    """Solve op(A) x = b in place (b arrives in x) by substitution."""
    precision = a.precision
    check_precision(ctx, precision, a, x)
    if n == 0:
        return
    lda = lda if lda is not None else n
    av = matrix_view(a, a_offset, n, n, lda)
    adapter = _triangular_adapter(layout, triangle, trans, diagonal, n, av,
                                  precision, "dense")
    dense = adapter.materialize()  # op(A) in the compute dtype
    # Effective orientation of op(A) decides the substitution direction.
    tri = triangle if layout is Layout.COL_MAJOR else flip_triangle(triangle)
    eff_trans, _ = compose_op(layout, trans)
    upper = (tri is Triangle.UPPER) == (eff_trans is Transpose.NO)
    xs = vec(x, x_offset, n, x_inc)
    sol = substitute(dense, xs.astype(precision.compute_dtype), upper,
                     diagonal is Diagonal.UNIT)
    xs[...] = sol.astype(precision.dtype, copy=False)


def substitute(t: np.ndarray, b: np.ndarray, upper: bool, unit: bool) -> np.ndarray:
    """Forward/back substitution on a dense triangular matrix.

    ``t`` must be the fully materialized op(A) (implied zeros/unit diagonal
    already applied when ``unit``); raises on an exact zero diagonal
    otherwise.
    """
    n = b.shape[0]
    x = b.copy()
    order = range(n - 1, -1, -1) if upper else range(n)
    for i in order:
        if upper:
            if i < n - 1:
                x[i] = x[i] - t[i, i + 1 :] @ x[i + 1 :]
        else:
            if i > 0:
                x[i] = x[i] - t[i, :i] @ x[:i]
        if not unit:
            d = t[i, i]
            if d == 0:
                raise SingularMatrixError(i)
            x[i] = x[i] / d
    return x


# ---------------------------------------------------------------------------
# Rank-1 and rank-2 updates
# ---------------------------------------------------------------------------

def _run_ger_kernel(ctx, precision, m, n, alpha, xs, ys, av):
    store = get_store(ctx)
    cfg, _ = store.resolve("ger", precision, ctx.device, (m, n, 0))
    cdt = precision.compute_dtype
    args = GerArgs(m=m, n=n, alpha=alpha, x=xs.astype(cdt, copy=False),
                   y=ys.astype(cdt, copy=False), a=av)
    run_kernel("ger", cfg, args, ctx, precision)


def _ger_any(ctx, layout, m, n, alpha, x, x_offset, x_inc, y, y_offset, y_inc,
             a, a_offset, lda, conj_y: bool):
    precision = a.precision
    check_precision(ctx, precision, a, x, y)
    if m < 0 or n < 0:
        raise UsageError("ger dimensions must be >= 0")
    if m == 0 or n == 0:
        return
    lda = lda if lda is not None else (m if layout is Layout.COL_MAJOR else n)
    xs = vec(x, x_offset, m, x_inc)
    ys = vec(y, y_offset, n, y_inc)
    alpha = scalar(alpha, precision)
    if layout is Layout.COL_MAJOR:
        av = matrix_view(a, a_offset, m, n, lda)
        yv = np.conj(ys) if conj_y else ys
        _run_ger_kernel(ctx, precision, m, n, alpha, xs, yv, av)
    else:
        # A_rm += alpha x y^(T/H)  ==  A_cm_bytes += alpha op(y) x^T
        av = matrix_view(a, a_offset, n, m, lda)
        yv = np.conj(ys) if conj_y else ys
        _run_ger_kernel(ctx, precision, n, m, alpha, yv, xs, av)


def ger(ctx: Context, layout: Layout, m: int, n: int, alpha, x: Buffer, y: Buffer,
        a: Buffer, *, x_offset: int = 0, x_inc: int = 1, y_offset: int = 0,
        y_inc: int = 1, a_offset: int = 0, lda: int | None = None) -> None:
    """A += alpha x y^T (real precisions)."""
    if a.precision.is_complex:
        raise UsageError("ger is real-only; use geru or gerc")
    _ger_any(ctx, layout, m, n, alpha, x, x_offset, x_inc, y, y_offset, y_inc,
             a, a_offset, lda, conj_y=False)


def geru(ctx: Context, layout: Layout, m: int, n: int, alpha, x: Buffer, y: Buffer,
         a: Buffer, *, x_offset: int = 0, x_inc: int = 1, y_offset: int = 0,
         y_inc: int = 1, a_offset: int = 0, lda: int | None = None) -> None:
    """A += alpha x y^T (complex, no conjugation)."""
    if not a.precision.is_complex:
        raise UsageError("geru is complex-only; use ger")
    _ger_any(ctx, layout, m, n, alpha, x, x_offset, x_inc, y, y_offset, y_inc,
             a, a_offset, lda, conj_y=False)


def gerc(ctx: Context, layout: Layout, m: int, n: int, alpha, x: Buffer, y: Buffer,
         a: Buffer, *, x_offset: int = 0, x_inc: int = 1, y_offset: int = 0,
         y_inc: int = 1, a_offset: int = 0, lda: int | None = None) -> None:
    """A += alpha x y^H."""
    if not a.precision.is_complex:
        raise UsageError("gerc is complex-only; use ger")
    _ger_any(ctx, layout, m, n, alpha, x, x_offset, x_inc, y, y_offset, y_inc,
             a, a_offset, lda, conj_y=True)


def _triangle_mask(n, triangle: Triangle):
    ii = np.arange(n)[:, None]
    jj = np.arange(n)[None, :]
    return (ii <= jj) if triangle is Triangle.UPPER else (ii >= jj)


def _rank_update_dense(ctx, layout, triangle, n, update_fn, a, a_offset, lda,
                       precision, hermitian):
    """Apply a stored-triangle-only update to dense symmetric storage.

    ``update_fn`` produces the full n x n update in the compute dtype; only
    the stored triangle is written.  Row-major flips the stored triangle and
    conjugates the stored values.
    """
    lda = lda if lda is not None else n
    av = matrix_view(a, a_offset, n, n, lda)
    tri = triangle if layout is Layout.COL_MAJOR else flip_triangle(triangle)
    upd = update_fn()
    if layout is Layout.ROW_MAJOR:
        # Stored bytes read column-major hold A^T, so apply the transposed
        # update (for hermitian updates U^T == conj(U), as required).
        upd = upd.T
    mask = _triangle_mask(n, tri)
    cur = av.astype(precision.compute_dtype)
    new = cur + upd
    if hermitian:
        ii = np.arange(n)
        new[ii, ii] = new[ii, ii].real
    av[mask] = new[mask].astype(precision.dtype, copy=False)


def syr(ctx: Context, layout: Layout, triangle: Triangle, n: int, alpha,
        x: Buffer, a: Buffer, *, x_offset: int = 0, x_inc: int = 1,
        a_offset: int = 0, lda: int | None = None) -> None:
    """A += alpha x x^T on the stored triangle (real)."""
    precision = a.precision
    if precision.is_complex:
        raise UsageError("syr is real-only; use her")
    check_precision(ctx, precision, a, x)
    if n == 0:
        return
    xs = vec(x, x_offset, n, x_inc).astype(precision.compute_dtype)
    al = scalar(alpha, precision)
    _rank_update_dense(ctx, layout, triangle, n, lambda: al * np.outer(xs, xs),
                       a, a_offset, lda, precision, hermitian=False)


def her(ctx: Context, layout: Layout, triangle: Triangle, n: int, alpha,
        x: Buffer, a: Buffer, *, x_offset: int = 0, x_inc: int = 1,
        a_offset: int = 0, lda: int | None = None) -> None:
    """A += alpha x x^H with real alpha; the diagonal stays real."""
    precision = a.precision
    if not precision.is_complex:
        raise UsageError("her is complex-only; use syr")
    check_precision(ctx, precision, a, x)
    if n == 0:
        return
    if isinstance(alpha, complex) and alpha.imag != 0:
        raise UsageError("her requires a real alpha")
    al = float(np.real(alpha))
    xs = vec(x, x_offset, n, x_inc).astype(precision.compute_dtype)
    _rank_update_dense(ctx, layout, triangle, n,
                       lambda: al * np.outer(xs, np.conj(xs)),
                       a, a_offset, lda, precision, hermitian=True)


def syr2(ctx: Context, layout: Layout, triangle: Triangle, n: int, alpha,
         x: Buffer, y: Buffer, a: Buffer, *, x_offset: int = 0, x_inc: int = 1,
         y_offset: int = 0, y_inc: int = 1, a_offset: int = 0,
         lda: int | None = None) -> None:
    """A += alpha (x y^T + y x^T) on the stored triangle (real)."""
    precision = a.precision
    if precision.is_complex:
        raise UsageError("syr2 is real-only; use her2")
    check_precision(ctx, precision, a, x, y)
    if n == 0:
        return
    cdt = precision.compute_dtype
    xs = vec(x, x_offset, n, x_inc).astype(cdt)
    ys = vec(y, y_offset, n, y_inc).astype(cdt)
    al = scalar(alpha, precision)
    _rank_update_dense(ctx, layout, triangle, n,
                       lambda: al * (np.outer(xs, ys) + np.outer(ys, xs)),
                       a, a_offset, lda, precision, hermitian=False)


def her2(ctx: Context, layout: Layout, triangle: Triangle, n: int, alpha,
         x: Buffer, y: Buffer, a: Buffer, *, x_offset: int = 0, x_inc: int = 1,
         y_offset: int = 0, y_inc: int = 1, a_offset: int = 0,
         lda: int | None = None) -> None:
    """A += alpha x y^H + conj(alpha) y x^H; the diagonal stays real."""
    precision = a.precision
    if not precision.is_complex:
        raise UsageError("her2 is complex-only; use syr2")
    check_precision(ctx, precision, a, x, y)
    if n == 0:
        return
    cdt = precision.compute_dtype
    xs = vec(x, x_offset, n, x_inc).astype(cdt)
    ys = vec(y, y_offset, n, y_inc).astype(cdt)
    al = scalar(alpha, precision)

    def upd():
        return al * np.outer(xs, np.conj(ys)) + np.conj(al) * np.outer(ys, np.conj(xs))

    _rank_update_dense(ctx, layout, triangle, n, upd, a, a_offset, lda,
                       precision, hermitian=True)


def _rank_update_packed(ctx, layout, triangle, n, update_fn, ap, ap_offset,
                        precision, hermitian):
    """Packed-storage rank update via a vectorized index scatter."""
    packed = vec(ap, ap_offset, n * (n + 1) // 2, 1)
    tri = triangle if layout is Layout.COL_MAJOR else flip_triangle(triangle)
    upd = update_fn()
    if layout is Layout.ROW_MAJOR:
        upd = upd.T
    rows, cols = np.nonzero(_triangle_mask(n, tri))
    idx = packed_index(n, tri, rows, cols)
    cur = packed[idx].astype(precision.compute_dtype)
    new = cur + upd[rows, cols]
    if hermitian:
        diag = rows == cols
        new[diag] = new[diag].real
    packed[idx] = new.astype(precision.dtype, copy=False)


def spr(ctx: Context, layout: Layout, triangle: Triangle, n: int, alpha,
        x: Buffer, ap: Buffer, *, x_offset: int = 0, x_inc: int = 1,
        ap_offset: int = 0) -> None:
    """Packed A += alpha x x^T (real)."""
    precision = ap.precision
    if precision.is_complex:
        raise UsageError("spr is real-only; use hpr")
    check_precision(ctx, precision, ap, x)
    if n == 0:
        return
    xs = vec(x, x_offset, n, x_inc).astype(precision.compute_dtype)
    al = scalar(alpha, precision)
    _rank_update_packed(ctx, layout, triangle, n, lambda: al * np.outer(xs, xs),
                        ap, ap_offset, precision, hermitian=False)


def hpr(ctx: Context, layout: Layout, triangle: Triangle, n: int, alpha,
        x: Buffer, ap: Buffer, *, x_offset: int = 0, x_inc: int = 1,
        ap_offset: int = 0) -> None:
    """Packed A += alpha x x^H with real alpha."""
    precision = ap.precision
    if not precision.is_complex:
        raise UsageError("hpr is complex-only; use spr")
    check_precision(ctx, precision, ap, x)
    if n == 0:
        return
    if isinstance(alpha, complex) and alpha.imag != 0:
        raise UsageError("hpr requires a real alpha")
    al = float(np.real(alpha))
    xs = vec(x, x_offset, n, x_inc).astype(precision.compute_dtype)
    _rank_update_packed(ctx, layout, triangle, n,
                        lambda: al * np.outer(xs, np.conj(xs)),
                        ap, ap_offset, precision, hermitian=True)


def spr2(ctx: Context, layout: Layout, triangle: Triangle, n: int, alpha,
         x: Buffer, y: Buffer, ap: Buffer, *, x_offset: int = 0, x_inc: int = 1,
         y_offset: int = 0, y_inc: int = 1, ap_offset: int = 0) -> None:
    """Packed A += alpha (x y^T + y x^T) (real)."""
    precision = ap.precision
    if precision.is_complex:
        raise UsageError("spr2 is real-only; use hpr2")
    check_precision(ctx, precision, ap, x, y)
    if n == 0:
        return
    cdt = precision.compute_dtype
    xs = vec(x, x_offset, n, x_inc).astype(cdt)
    ys = vec(y, y_offset, n, y_inc).astype(cdt)
    al = scalar(alpha, precision)
    _rank_update_packed(ctx, layout, triangle, n,
                        lambda: al * (np.outer(xs, ys) + np.outer(ys, xs)),
                        ap, ap_offset, precision, hermitian=False)


def hpr2(ctx: Context, layout: Layout, triangle: Triangle, n: int, alpha,
         x: Buffer, y: Buffer, ap: Buffer, *, x_offset: int = 0, x_inc: int = 1,
         y_offset: int = 0, y_inc: int = 1, ap_offset: int = 0) -> None:
    """Packed A += alpha x y^H + conj(alpha) y x^H."""
    precision = ap.precision
    if not precision.is_complex:
        raise UsageError("hpr2 is complex-only; use spr2")
    check_precision(ctx, precision, ap, x, y)
    if n == 0:
        return
    cdt = precision.compute_dtype
    xs = vec(x, x_offset, n, x_inc).astype(cdt)
    ys = vec(y, y_offset, n, y_inc).astype(cdt)
    al = scalar(alpha, precision)

    def upd():
        return al * np.outer(xs, np.conj(ys)) + np.conj(al) * np.outer(ys, np.conj(xs))

    _rank_update_packed(ctx, layout, triangle, n, upd, ap, ap_offset,
                        precision, hermitian=True)
