"""Level-3 routines: matrix-matrix products built on the tiled matmul kernel.

Small problems take the bounds-checked direct kernel; larger ones go through
the indirect pipeline, which pads operands to exact tile multiples (with B
transposed) so the tiled kernel runs free of edge cases.  The structured
variants materialize their operand through the symmetrize / triangularize
transform kernels and reuse the same matmul machinery.
"""

from __future__ import annotations

import numpy as np

from ..core import (
    Buffer,
    Context,
    Diagonal,
    Layout,
    Side,
    Transpose,
    Triangle,
    matrix_view,
)
from ..errors import SingularMatrixError, UsageError
from ..kernels import (
    GemmDirectArgs,
    GemmIndirectArgs,
    run_kernel,
    run_transform,
)
from .common import check_precision, get_store, scalar
from .level2 import substitute

__all__ = ["gemm", "symm", "hemm", "syrk", "herk", "syr2k", "her2k", "trmm", "trsm"]


def _ceil_to(x: int, step: int) -> int:
    return -(-x // step) * step


def _logical(buf, offset, rows, cols, ld, layout):
    """Logical (rows, cols) view regardless of storage layout."""
    if layout is Layout.COL_MAJOR:
        return matrix_view(buf, offset, rows, cols, ld)
    return matrix_view(buf, offset, cols, rows, ld).T


def _gemm_on_arrays(ctx, precision, m, n, k, alpha, a_arr, bt_arr, beta, c_view,
                    force_kernel=None):
    """C = alpha * A @ B + beta * C with dense compute-dtype inputs.

    ``a_arr`` is (m, k); ``bt_arr`` is (n, k) holding B transposed.  Results
    are written through ``c_view`` (storage dtype) with one rounding.
    """
    store = get_store(ctx)
    cfg, _ = store.resolve("gemm", precision, ctx.device, (m, n, k))
    kernel = force_kernel
    if kernel is None:
        kernel = "direct" if max(m, n, k) < store.direct_threshold else "indirect"

    if kernel == "direct":
        args = GemmDirectArgs(
            m=m, n=n, k=k, alpha=alpha, beta=beta,
            a_get=lambda r0, r1: a_arr[r0:r1],
            bt_get=lambda c0, c1: bt_arr[c0:c1],
            c=c_view,
        )
        run_kernel("gemm_direct", cfg, args, ctx, precision)
        return

    v = cfg.as_dict()
    mp = _ceil_to(max(m, 1), v["MWG"])
    np_ = _ceil_to(max(n, 1), v["NWG"])
    kp = _ceil_to(max(k, 1), v["KWG"])
    cdt = precision.compute_dtype
    aw = np.zeros((mp, kp), dtype=cdt)
    aw[:m, :k] = a_arr
    btw = np.zeros((np_, kp), dtype=cdt)
    btw[:n, :k] = bt_arr
    cw = np.zeros((mp, np_), dtype=cdt)
    if beta != 0:
        cw[:m, :n] = c_view.astype(cdt, copy=False)
    run_kernel(
        "gemm",
        cfg,
        GemmIndirectArgs(mp=mp, np_=np_, kp=kp, alpha=alpha, beta=beta,
                         a=aw, bt=btw, c=cw),
        ctx,
        precision,
    )
    c_view[...] = cw[:m, :n].astype(precision.dtype, copy=False)


def gemm(ctx: Context, layout: Layout, trans_a: Transpose, trans_b: Transpose,
         m: int, n: int, k: int, alpha, a: Buffer, b: Buffer, beta, c: Buffer, *,
         a_offset: int = 0, lda: int | None = None,
         b_offset: int = 0, ldb: int | None = None,
         c_offset: int = 0, ldc: int | None = None,
         kernel: str | None = None) -> None:
    """C = alpha * op(A) op(B) + beta * C.

    ``kernel`` forces the 'direct' or 'indirect' path (testing/benchmark
    knob); by default sizes below the store's direct_threshold take the
    direct kernel.
    """
    precision = a.precision
    check_precision(ctx, precision, a, b, c)
    if m < 0 or n < 0 or k < 0:
        raise UsageError("gemm dimensions must be >= 0")
    if kernel not in (None, "direct", "indirect"):
        raise UsageError("kernel must be None, 'direct' or 'indirect'")
    if m == 0 or n == 0:
        return
    a_rows, a_cols = (m, k) if trans_a is Transpose.NO else (k, m)
    b_rows, b_cols = (k, n) if trans_b is Transpose.NO else (n, k)
    lda = lda if lda is not None else (a_rows if layout is Layout.COL_MAJOR else a_cols)
    ldb = ldb if ldb is not None else (b_rows if layout is Layout.COL_MAJOR else b_cols)
    ldc = ldc if ldc is not None else (m if layout is Layout.COL_MAJOR else n)
    av = _logical(a, a_offset, a_rows, a_cols, lda, layout)
    bv = _logical(b, b_offset, b_rows, b_cols, ldb, layout)
    cv = _logical(c, c_offset, m, n, ldc, layout)

    alpha = scalar(alpha, precision)
    beta = scalar(beta, precision)
    if k == 0 or alpha == 0:
        # Only the beta scaling remains; no read of A or B.
        if beta == 0:
            cv[...] = 0
        else:
            cv[...] = (beta * cv.astype(precision.compute_dtype)).astype(
                precision.dtype, copy=False)
        return

    cdt = precision.compute_dtype
    a_op = av if trans_a is Transpose.NO else av.T
    if trans_a is Transpose.CONJUGATE:
        a_op = np.conj(a_op)
    a_arr = np.ascontiguousarray(a_op, dtype=cdt)
    # bt rows are op(B) columns: B^T for NO, the stored (n, k) matrix for YES,
    # its conjugate for CONJUGATE.
    if trans_b is Transpose.NO:
        b_op = bv.T
    elif trans_b is Transpose.YES:
        b_op = bv
    else:
        b_op = np.conj(bv)
    bt_arr = np.ascontiguousarray(b_op, dtype=cdt)
    _gemm_on_arrays(ctx, precision, m, n, k, alpha, a_arr, bt_arr, beta, cv,
                    force_kernel=kernel)


def _transform_cfg(ctx, precision):
    store = get_store(ctx)
    cfg, _ = store.resolve("transform", precision, ctx.device, (0, 0, 0))
    return cfg


def _materialize_structured(ctx, precision, kind, view, n, triangle, diagonal=None):
    """Full dense matrix from symmetric/hermitian/triangular storage."""
    cdt = precision.compute_dtype
    out = np.zeros((n, n), dtype=cdt)
    cfg = _transform_cfg(ctx, precision)
    run_transform(kind, view, out, ctx, cfg, precision, triangle=triangle,
                  diagonal=diagonal or Diagonal.NON_UNIT)
    return out


def _structured_side_multiply(ctx, precision, side, m, n, alpha, full_a, bv, beta, cv):
    """C = alpha * A B + beta * C (side LEFT) or alpha * B A + beta * C (RIGHT)."""
    cdt = precision.compute_dtype
    if side is Side.LEFT:
        a_arr = full_a
        bt_arr = np.ascontiguousarray(bv.T, dtype=cdt)
        _gemm_on_arrays(ctx, precision, m, n, m, alpha, a_arr, bt_arr, beta, cv)
    else:
        a_arr = np.ascontiguousarray(bv, dtype=cdt)
        bt_arr = np.ascontiguousarray(full_a.T, dtype=cdt)
        _gemm_on_arrays(ctx, precision, m, n, n, alpha, a_arr, bt_arr, beta, cv)


def _symm_hemm(ctx, layout, side, triangle, m, n, alpha, a, b, beta, c,
               a_offset, lda, b_offset, ldb, c_offset, ldc, hermitian):
    precision = a.precision
    check_precision(ctx, precision, a, b, c)
    if m < 0 or n < 0:
        raise UsageError("dimensions must be >= 0")
    if m == 0 or n == 0:
        return
    na = m if side is Side.LEFT else n
    lda = lda if lda is not None else na
    ldb = ldb if ldb is not None else (m if layout is Layout.COL_MAJOR else n)
    ldc = ldc if ldc is not None else (m if layout is Layout.COL_MAJOR else n)
    # Structured storage under row-major: bytes hold A^T, so flip the stored
    # triangle; hermitian values additionally conjugate, symmetric are equal.
    av = matrix_view(a, a_offset, na, na, lda)
    tri = triangle
    if layout is Layout.ROW_MAJOR:
        tri = Triangle.LOWER if triangle is Triangle.UPPER else Triangle.UPPER
    bv = _logical(b, b_offset, m, n, ldb, layout)
    cv = _logical(c, c_offset, m, n, ldc, layout)
    kind = "hermitize" if hermitian else "symmetrize"
    full_a = _materialize_structured(ctx, precision, kind, av, na, tri)
    if hermitian and layout is Layout.ROW_MAJOR:
        full_a = np.conj(full_a)
    _structured_side_multiply(ctx, precision, side, m, n, scalar(alpha, precision),
                              full_a, bv, scalar(beta, precision), cv)


def symm(ctx: Context, layout: Layout, side: Side, triangle: Triangle,
         m: int, n: int, alpha, a: Buffer, b: Buffer, beta, c: Buffer, *,
         a_offset: int = 0, lda: int | None = None, b_offset: int = 0,
         ldb: int | None = None, c_offset: int = 0, ldc: int | None = None) -> None:
    """C = alpha * A B + beta * C with A symmetric (either side)."""
    _symm_hemm(ctx, layout, side, triangle, m, n, alpha, a, b, beta, c,
               a_offset, lda, b_offset, ldb, c_offset, ldc, hermitian=False)


def hemm(ctx: Context, layout: Layout, side: Side, triangle: Triangle,
         m: int, n: int, alpha, a: Buffer, b: Buffer, beta, c: Buffer, *,
         a_offset: int = 0, lda: int | None = None, b_offset: int = 0,
         ldb: int | None = None, c_offset: int = 0, ldc: int | None = None) -> None:
    """C = alpha * A B + beta * C with A hermitian (complex only)."""
    if not a.precision.is_complex:
        raise UsageError("hemm is complex-only; use symm")
    _symm_hemm(ctx, layout, side, triangle, m, n, alpha, a, b, beta, c,
               a_offset, lda, b_offset, ldb, c_offset, ldc, hermitian=True)


# ---------------------------------------------------------------------------
# Rank-k and rank-2k updates (triangle-masked writes)
# ---------------------------------------------------------------------------

def _masked_triangle_update(cv, product, alpha, beta, n, triangle, precision,
                            real_diagonal=False):
    """C_tri = alpha*product + beta*C_tri on the selected triangle only."""
    cdt = precision.compute_dtype
    ii = np.arange(n)[:, None]
    jj = np.arange(n)[None, :]
    mask = (ii <= jj) if triangle is Triangle.UPPER else (ii >= jj)
    new = alpha * product
    if beta != 0:
        new = new + beta * cv.astype(cdt, copy=False)
    if real_diagonal and np.iscomplexobj(new):
        d = np.arange(n)
        new[d, d] = new[d, d].real
    cv[mask] = new[mask].astype(precision.dtype, copy=False)


def _rank_k_product(ctx, precision, n, k, a_arr, bt_arr):
    """Dense op(A) @ op2(A) product via the matmul machinery into a temp."""
    cdt = precision.compute_dtype
    tmp = np.zeros((n, n), dtype=cdt)
    _gemm_on_arrays(ctx, precision, n, n, k, cdt.type(1), a_arr, bt_arr,
                    cdt.type(0), tmp)
    return tmp


def syrk(ctx: Context, layout: Layout, triangle: Triangle, trans: Transpose,
         n: int, k: int, alpha, a: Buffer, beta, c: Buffer, *,
         a_offset: int = 0, lda: int | None = None,
         c_offset: int = 0, ldc: int | None = None) -> None:
    """C_tri = alpha * op(A) op(A)^T + beta * C_tri."""
    precision = a.precision
    check_precision(ctx, precision, a, c)
    if trans is Transpose.CONJUGATE and precision.is_complex:
        raise UsageError("syrk takes No/Yes transpose; use herk for conjugation")
    if n < 0 or k < 0:
        raise UsageError("dimensions must be >= 0")
    if n == 0:
        return
    a_rows, a_cols = (n, k) if trans is Transpose.NO else (k, n)
    lda = lda if lda is not None else (a_rows if layout is Layout.COL_MAJOR else a_cols)
    ldc = ldc if ldc is not None else n
    av = _logical(a, a_offset, a_rows, a_cols, lda, layout)
    cv = _logical(c, c_offset, n, n, ldc, layout)
    tri = triangle
    cdt = precision.compute_dtype
    op_a = av if trans is Transpose.NO else av.T
    a_arr = np.ascontiguousarray(op_a, dtype=cdt)
    alpha_v = scalar(alpha, precision)
    beta_v = scalar(beta, precision)
    if k == 0 or alpha_v == 0:
        product = np.zeros((n, n), dtype=cdt)
    else:
        product = _rank_k_product(ctx, precision, n, k, a_arr, a_arr)
    _masked_triangle_update(cv, product, alpha_v, beta_v, n, tri, precision)


def herk(ctx: Context, layout: Layout, triangle: Triangle, trans: Transpose,
         n: int, k: int, alpha, a: Buffer, beta, c: Buffer, *,
         a_offset: int = 0, lda: int | None = None,
         c_offset: int = 0, ldc: int | None = None) -> None:
    """C_tri = alpha * op(A) op(A)^H + beta * C_tri; alpha and beta real."""
    precision = a.precision
    if not precision.is_complex:
        raise UsageError("herk is complex-only; use syrk")
    check_precision(ctx, precision, a, c)
    if n < 0 or k < 0:
        raise UsageError("dimensions must be >= 0")
    if n == 0:
        return
    for name, value in (("alpha", alpha), ("beta", beta)):
        if isinstance(value, complex) and value.imag != 0:
            raise UsageError(f"herk requires a real {name}")
    alpha_v = float(np.real(alpha))
    beta_v = float(np.real(beta))
    a_rows, a_cols = (n, k) if trans is Transpose.NO else (k, n)
    lda = lda if lda is not None else (a_rows if layout is Layout.COL_MAJOR else a_cols)
    ldc = ldc if ldc is not None else n
    av = _logical(a, a_offset, a_rows, a_cols, lda, layout)
    cv = _logical(c, c_offset, n, n, ldc, layout)
    cdt = precision.compute_dtype
    op_a = av if trans is Transpose.NO else np.conj(av.T)
    a_arr = np.ascontiguousarray(op_a, dtype=cdt)
    if k == 0 or alpha_v == 0:
        product = np.zeros((n, n), dtype=cdt)
    else:
        product = _rank_k_product(ctx, precision, n, k, a_arr, np.conj(a_arr))
    _masked_triangle_update(cv, product, alpha_v, beta_v, n, triangle, precision,
                            real_diagonal=True)


def syr2k(ctx: Context, layout: Layout, triangle: Triangle, trans: Transpose,
          n: int, k: int, alpha, a: Buffer, b: Buffer, beta, c: Buffer, *,
          a_offset: int = 0, lda: int | None = None, b_offset: int = 0,
          ldb: int | None = None, c_offset: int = 0, ldc: int | None = None) -> None:
    """C_tri = alpha*(op(A) op(B)^T + op(B) op(A)^T) + beta*C_tri."""
    precision = a.precision
    check_precision(ctx, precision, a, b, c)
    if n < 0 or k < 0:
        raise UsageError("dimensions must be >= 0")
    if n == 0:
        return
    a_rows, a_cols = (n, k) if trans is Transpose.NO else (k, n)
    lda = lda if lda is not None else (a_rows if layout is Layout.COL_MAJOR else a_cols)
    ldb = ldb if ldb is not None else lda
    ldc = ldc if ldc is not None else n
    av = _logical(a, a_offset, a_rows, a_cols, lda, layout)
    bv = _logical(b, b_offset, a_rows, a_cols, ldb, layout)
    cv = _logical(c, c_offset, n, n, ldc, layout)
    cdt = precision.compute_dtype
    op_a = av if trans is Transpose.NO else av.T
    op_b = bv if trans is Transpose.NO else bv.T
    a_arr = np.ascontiguousarray(op_a, dtype=cdt)
    b_arr = np.ascontiguousarray(op_b, dtype=cdt)
    alpha_v = scalar(alpha, precision)
    beta_v = scalar(beta, precision)
    if k == 0 or alpha_v == 0:
        product = np.zeros((n, n), dtype=cdt)
    else:
        product = _rank_k_product(ctx, precision, n, k, a_arr, b_arr)
        product = product + _rank_k_product(ctx, precision, n, k, b_arr, a_arr)
    _masked_triangle_update(cv, product, alpha_v, beta_v, n, triangle, precision)


def her2k(ctx: Context, layout: Layout, triangle: Triangle, trans: Transpose,
          n: int, k: int, alpha, a: Buffer, b: Buffer, beta, c: Buffer, *,
          a_offset: int = 0, lda: int | None = None, b_offset: int = 0,
          ldb: int | None = None, c_offset: int = 0, ldc: int | None = None) -> None:
    """C_tri = alpha op(A) op(B)^H + conj(alpha) op(B) op(A)^H + beta C_tri."""
    precision = a.precision
    if not precision.is_complex:
        raise UsageError("her2k is complex-only; use syr2k")
    check_precision(ctx, precision, a, b, c)
    if n < 0 or k < 0:
        raise UsageError("dimensions must be >= 0")
    if n == 0:
        return
    if isinstance(beta, complex) and beta.imag != 0:
        raise UsageError("her2k requires a real beta")
    a_rows, a_cols = (n, k) if trans is Transpose.NO else (k, n)
    lda = lda if lda is not None else (a_rows if layout is Layout.COL_MAJOR else a_cols)
    ldb = ldb if ldb is not None else lda
    ldc = ldc if ldc is not None else n
    av = _logical(a, a_offset, a_rows, a_cols, lda, layout)
    bv = _logical(b, b_offset, a_rows, a_cols, ldb, layout)
    cv = _logical(c, c_offset, n, n, ldc, layout)
    cdt = precision.compute_dtype
    op_a = av if trans is Transpose.NO else np.conj(av.T)
    op_b = bv if trans is Transpose.NO else np.conj(bv.T)
    a_arr = np.ascontiguousarray(op_a, dtype=cdt)
    b_arr = np.ascontiguousarray(op_b, dtype=cdt)
    alpha_v = scalar(alpha, precision)
    beta_v = float(np.real(beta))
    if k == 0 or alpha_v == 0:
        product = np.zeros((n, n), dtype=cdt)
    else:
        p1 = _rank_k_product(ctx, precision, n, k, a_arr, np.conj(b_arr))
        p2 = _rank_k_product(ctx, precision, n, k, b_arr, np.conj(a_arr))
        product = alpha_v * p1 + np.conj(alpha_v) * p2
    _masked_triangle_update(cv, product, cdt.type(1), beta_v, n, triangle,
                            precision, real_diagonal=True)


# ---------------------------------------------------------------------------
# Triangular multiply and solve
# ---------------------------------------------------------------------------

def _triangular_full(ctx, precision, layout, triangle, trans, diagonal, na,
                     a, a_offset, lda):
    """Materialized op(A) for a dense triangular operand."""
    lda = lda if lda is not None else na
    av = matrix_view(a, a_offset, na, na, lda)
    tri = triangle
    if layout is Layout.ROW_MAJOR:
        tri = Triangle.LOWER if triangle is Triangle.UPPER else Triangle.UPPER
    full = _materialize_structured(ctx, precision, "triangularize", av, na, tri,
                                   diagonal)
    eff = trans
    if layout is Layout.ROW_MAJOR:
        # Bytes hold A^T: fold the layout into the op.
        if trans is Transpose.NO:
            full = full.T
        elif trans is Transpose.CONJUGATE:
            full = np.conj(full)
        # trans YES: the bytes already are A^T
        return np.ascontiguousarray(full, dtype=precision.compute_dtype)
    if eff is not Transpose.NO:
        full = full.T
        if eff is Transpose.CONJUGATE:
            full = np.conj(full)
    return np.ascontiguousarray(full, dtype=precision.compute_dtype)


def trmm(ctx: Context, layout: Layout, side: Side, triangle: Triangle,
         trans: Transpose, diagonal: Diagonal, m: int, n: int, alpha,
         a: Buffer, b: Buffer, *, a_offset: int = 0, lda: int | None = None,
         b_offset: int = 0, ldb: int | None = None) -> None:
    """B = alpha * op(A) B (side LEFT) or alpha * B op(A) (side RIGHT), in place."""
    precision = a.precision
    check_precision(ctx, precision, a, b)
    if m < 0 or n < 0:
        raise UsageError("dimensions must be >= 0")
    if m == 0 or n == 0:
        return
    na = m if side is Side.LEFT else n
    ldb = ldb if ldb is not None else (m if layout is Layout.COL_MAJOR else n)
    bv = _logical(b, b_offset, m, n, ldb, layout)
    full_a = _triangular_full(ctx, precision, layout, triangle, trans, diagonal,
                              na, a, a_offset, lda)
    cdt = precision.compute_dtype
    alpha_v = scalar(alpha, precision)
    b_in = bv.astype(cdt)
    if side is Side.LEFT:
        _gemm_on_arrays(ctx, precision, m, n, m, alpha_v, full_a,
                        np.ascontiguousarray(b_in.T), cdt.type(0), bv)
    else:
        _gemm_on_arrays(ctx, precision, m, n, n, alpha_v,
                        np.ascontiguousarray(b_in),
                        np.ascontiguousarray(full_a.T), cdt.type(0), bv)


def trsm(ctx: Context, layout: Layout, side: Side, triangle: Triangle,
         trans: Transpose, diagonal: Diagonal, m: int, n: int, alpha,
         a: Buffer, b: Buffer, *, a_offset: int = 0, lda: int | None = None,
         b_offset: int = 0, ldb: int | None = None, block_size: int = 32) -> None:
    """Solve op(A) X = alpha B (LEFT) or X op(A) = alpha B (RIGHT), X into B.

    Blocked substitution: diagonal blocks solve by substitution, off-diagonal
    panels update through the matmul kernel.
    """
    precision = a.precision
    check_precision(ctx, precision, a, b)
    if m < 0 or n < 0:
        raise UsageError("dimensions must be >= 0")
    if m == 0 or n == 0:
        return
    na = m if side is Side.LEFT else n
    ldb = ldb if ldb is not None else (m if layout is Layout.COL_MAJOR else n)
    bv = _logical(b, b_offset, m, n, ldb, layout)
    full_a = _triangular_full(ctx, precision, layout, triangle, trans, diagonal,
                              na, a, a_offset, lda)
    _check_diagonal(full_a, diagonal)
    cdt = precision.compute_dtype
    alpha_v = scalar(alpha, precision)

    if side is Side.LEFT:
        x = (alpha_v * bv.astype(cdt)).astype(cdt)
        upper = _is_upper(full_a)
        _blocked_left_solve(ctx, precision, full_a, x, upper,
                            diagonal is Diagonal.UNIT, block_size)
        bv[...] = x.astype(precision.dtype, copy=False)
    else:
        # X op(A) = alpha B  <=>  op(A)^T X^T = alpha B^T
        xt = (alpha_v * bv.T.astype(cdt)).astype(cdt)
        at = np.ascontiguousarray(full_a.T)
        upper = _is_upper(at)
        _blocked_left_solve(ctx, precision, at, xt, upper,
                            diagonal is Diagonal.UNIT, block_size)
        bv[...] = xt.T.astype(precision.dtype, copy=False)


def _is_upper(t: np.ndarray) -> bool:
    n = t.shape[0]
    if n <= 1:
        return True
    return not np.any(np.tril(t, -1))


def _check_diagonal(full_a, diagonal):
    if diagonal is Diagonal.UNIT:
        return
    zeros = np.nonzero(np.diagonal(full_a) == 0)[0]
    if zeros.size:
        raise SingularMatrixError(int(zeros[0]))


def _blocked_left_solve(ctx, precision, t, x, upper: bool, unit: bool, nb: int):
    """In-place solve T X = X with T dense triangular, blocked by ``nb``."""
    n = t.shape[0]
    cdt = precision.compute_dtype
    blocks = list(range(0, n, nb))
    order = blocks if not upper else list(reversed(blocks))
    for i0 in order:
        i1 = min(i0 + nb, n)
        diag = t[i0:i1, i0:i1]
        x[i0:i1, :] = substitute(diag, x[i0:i1, :], upper, unit)
        if upper:
            if i0 > 0:
                panel = np.ascontiguousarray(t[:i0, i0:i1])
                _apply_panel_update(ctx, precision, panel, x[i0:i1], x[:i0])
        else:
            if i1 < n:
                panel = np.ascontiguousarray(t[i1:, i0:i1])
                _apply_panel_update(ctx, precision, panel, x[i0:i1], x[i1:])


def _apply_panel_update(ctx, precision, panel, solved, target):
    """target -= panel @ solved via the direct matmul kernel."""
    cdt = precision.compute_dtype
    m, k = panel.shape
    n = solved.shape[1]
    upd = np.zeros((m, n), dtype=cdt)
    _gemm_on_arrays(ctx, precision, m, n, k, cdt.type(1), panel,
                    np.ascontiguousarray(solved.T), cdt.type(0), upd,
                    force_kernel="direct")
    target -= upd
