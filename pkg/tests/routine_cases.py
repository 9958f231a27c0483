"""One randomized exerciser per Table-1 routine for the acceptance oracle suite.

Each case function draws random sizes/flags/scalars, runs the device-style
routine, and checks the result against an independent oracle at the spec
tolerance.  The registry at the bottom maps every routine name to its case
function and applicable precisions.
"""

from __future__ import annotations

import numpy as np

import tunedblas as tb
from tunedblas import Diagonal, Layout, Precision, Side, Transpose, Triangle

from conftest import make_buffer, rand_array
from oracles import (
    EPS,
    assert_close,
    band_to_full,
    conv2d_oracle,
    gemm_oracle,
    gemm_tol,
    gemv_oracle,
    matvec_tol,
    packed_to_full,
    reduce_tol,
    sym_band_to_full,
    sym_to_full,
    tri_to_full,
)

REAL = [Precision.H, Precision.S, Precision.D]
CPLX = [Precision.C, Precision.Z]
ALL5 = REAL + CPLX

LAYOUTS = [Layout.COL_MAJOR, Layout.ROW_MAJOR]
TRIANGLES = [Triangle.UPPER, Triangle.LOWER]
DIAGONALS = [Diagonal.NON_UNIT, Diagonal.UNIT]


def _mat_buffer(ctx, arr, precision, layout):
    arr = np.asarray(arr, dtype=precision.dtype)
    buf = tb.buffer_alloc(ctx, precision, arr.size)
    buf.data[:] = arr.reshape(-1, order="F" if layout is Layout.COL_MAJOR else "C")
    return buf


def _read_mat(buf, m, n, layout):
    if layout is Layout.COL_MAJOR:
        return buf.data[: m * n].reshape((n, m)).T.copy()
    return buf.data[: m * n].reshape((m, n)).copy()


def _scalar(rng, precision, real=False):
    if precision.is_complex and not real:
        return complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
    return float(rng.uniform(-1.5, 1.5))


def _size(rng, odd_multiples=False, lo=1, hi=40):
    if odd_multiples and rng.random() < 0.08:
        return int(129 * rng.integers(1, 3))
    return int(rng.integers(lo, hi))


def _inc(rng):
    return int(rng.choice([1, 1, 1, 2, 3, -1]))


def _vec_buffer_strided(ctx, rng, values, precision, inc):
    """Buffer whose strided view (offset, inc) equals ``values``."""
    n = values.shape[0]
    offset = int(rng.integers(0, 3))
    span = (n - 1) * abs(inc) + 1 if n else 0
    backing = rand_array(rng, offset + span + 2, precision)
    buf = make_buffer(ctx, backing, precision)
    view = tb.core.vector_view(buf, offset, n, inc)
    view[...] = values
    return buf, offset


# ---------------------------------------------------------------------------
# Level 1
# ---------------------------------------------------------------------------

def case_axpy(ctx, rng, precision):
    n = _size(rng, odd_multiples=True, hi=200)
    alpha = _scalar(rng, precision)
    xv = rand_array(rng, n, precision)
    yv = rand_array(rng, n, precision)
    xi, yi = _inc(rng), _inc(rng)
    x, xo = _vec_buffer_strided(ctx, rng, xv, precision, xi)
    y, yo = _vec_buffer_strided(ctx, rng, yv, precision, yi)
    tb.axpy(ctx, n, alpha, x, y, x_offset=xo, x_inc=xi, y_offset=yo, y_inc=yi)
    got = tb.core.vector_view(y, yo, n, yi)
    want = yv.astype(np.complex128) + alpha * xv.astype(np.complex128)
    tol = 4 * EPS[precision] * (np.abs(want) + np.abs(alpha) * np.abs(xv)
                                + np.abs(yv)) + 1e-30
    assert_close(got, want, tol, context=f"axpy {precision}")


def case_copy(ctx, rng, precision):
    n = _size(rng, hi=300)
    xv = rand_array(rng, n, precision)
    x = make_buffer(ctx, xv, precision)
    y = tb.buffer_alloc(ctx, precision, n)
    tb.copy(ctx, n, x, y)
    assert y.data.tobytes() == xv.tobytes()


def case_scal(ctx, rng, precision):
    n = _size(rng, hi=300)
    alpha = _scalar(rng, precision)
    xv = rand_array(rng, n, precision)
    x = make_buffer(ctx, xv, precision)
    tb.scal(ctx, n, alpha, x)
    want = alpha * xv.astype(np.complex128)
    tol = 4 * EPS[precision] * (np.abs(want) + 1e-3)
    assert_close(x.data, want, tol, context=f"scal {precision}")


def case_swap(ctx, rng, precision):
    n = _size(rng, hi=300)
    xv = rand_array(rng, n, precision)
    yv = rand_array(rng, n, precision)
    x = make_buffer(ctx, xv, precision)
    y = make_buffer(ctx, yv, precision)
    tb.swap(ctx, n, x, y)
    assert x.data.tobytes() == yv.tobytes()
    assert y.data.tobytes() == xv.tobytes()


def case_dot(ctx, rng, precision):
    n = _size(rng, odd_multiples=True, hi=300)
    xv = rand_array(rng, n, precision)
    yv = rand_array(rng, n, precision)
    x = make_buffer(ctx, xv, precision)
    y = make_buffer(ctx, yv, precision)
    got = tb.dot(ctx, n, x, y)
    want = np.sum(xv.astype(np.float64) * yv.astype(np.float64))
    assert_close(got, want, reduce_tol(xv, yv, precision), context=f"dot {precision}")


def case_dotu(ctx, rng, precision):
    n = _size(rng, hi=300)
    xv = rand_array(rng, n, precision)
    yv = rand_array(rng, n, precision)
    x, y = make_buffer(ctx, xv, precision), make_buffer(ctx, yv, precision)
    got = tb.dotu(ctx, n, x, y)
    want = np.sum(xv.astype(np.complex128) * yv.astype(np.complex128))
    assert_close(got, want, reduce_tol(xv, yv, precision), context="dotu")


def case_dotc(ctx, rng, precision):
    n = _size(rng, hi=300)
    xv = rand_array(rng, n, precision)
    yv = rand_array(rng, n, precision)
    x, y = make_buffer(ctx, xv, precision), make_buffer(ctx, yv, precision)
    got = tb.dotc(ctx, n, x, y)
    want = np.sum(np.conj(xv.astype(np.complex128)) * yv.astype(np.complex128))
    assert_close(got, want, reduce_tol(xv, yv, precision), context="dotc")


def case_nrm2(ctx, rng, precision):
    n = _size(rng, hi=300)
    xv = rand_array(rng, n, precision)
    x = make_buffer(ctx, xv, precision)
    got = tb.nrm2(ctx, n, x)
    want = float(np.linalg.norm(xv.astype(np.complex128)))
    assert_close(got, want, reduce_tol(xv, xv, precision) + 4 * EPS[precision] * want,
                 context=f"nrm2 {precision}")


def case_asum(ctx, rng, precision):
    n = _size(rng, hi=300)
    xv = rand_array(rng, n, precision)
    x = make_buffer(ctx, xv, precision)
    got = tb.asum(ctx, n, x)
    w = xv.astype(np.complex128)
    want = float(np.sum(np.abs(w.real) + np.abs(w.imag)))
    assert_close(got, want, reduce_tol(xv, None, precision) + 4 * EPS[precision] * want,
                 context=f"asum {precision}")


def case_sum(ctx, rng, precision):
    n = _size(rng, hi=300)
    xv = rand_array(rng, n, precision)
    x = make_buffer(ctx, xv, precision)
    got = tb.sum(ctx, n, x)
    want = np.sum(xv.astype(np.complex128))
    assert_close(got, want, reduce_tol(xv, None, precision) + 1e-30,
                 context=f"sum {precision}")


def _index_oracle(values, key, pick_max):
    keys = key(values.astype(np.complex128))
    return int(np.argmax(keys) if pick_max else np.argmin(keys))


def case_amax(ctx, rng, precision):
    n = _size(rng, hi=500)
    xv = rand_array(rng, n, precision)
    x = make_buffer(ctx, xv, precision)
    got = tb.amax(ctx, n, x)
    assert got == _index_oracle(xv, lambda v: np.abs(v.real) + np.abs(v.imag), True)


def case_amin(ctx, rng, precision):
    n = _size(rng, hi=500)
    xv = rand_array(rng, n, precision)
    x = make_buffer(ctx, xv, precision)
    got = tb.amin(ctx, n, x)
    assert got == _index_oracle(xv, lambda v: np.abs(v.real) + np.abs(v.imag), False)


def case_max(ctx, rng, precision):
    n = _size(rng, hi=500)
    xv = rand_array(rng, n, precision)
    x = make_buffer(ctx, xv, precision)
    assert tb.max(ctx, n, x) == int(np.argmax(xv))


def case_min(ctx, rng, precision):
    n = _size(rng, hi=500)
    xv = rand_array(rng, n, precision)
    x = make_buffer(ctx, xv, precision)
    assert tb.min(ctx, n, x) == int(np.argmin(xv))


# ---------------------------------------------------------------------------
# Level 2
# ---------------------------------------------------------------------------

def _matvec_check(ctx, rng, precision, full, y_buf, n_in, alpha, beta, xv, yv,
                  trans, context):
    got = y_buf
    want = gemv_oracle(alpha, full, xv, beta, yv, precision, trans)
    op = full if trans is Transpose.NO else full.T
    tol = (np.abs(alpha) * matvec_tol(op, xv, precision)
           + 4 * EPS[precision] * np.abs(beta * yv.astype(np.complex128)) + 1e-30)
    assert_close(got, want, tol, context=context)


def case_gemv(ctx, rng, precision):
    layout = rng.choice(LAYOUTS)
    trans = rng.choice([Transpose.NO, Transpose.YES] +
                       ([Transpose.CONJUGATE] if precision.is_complex else []))
    m = _size(rng, odd_multiples=True, hi=60)
    n = _size(rng, odd_multiples=True, hi=60)
    av = rand_array(rng, (m, n), precision)
    m_out, n_in = (m, n) if trans is Transpose.NO else (n, m)
    xv = rand_array(rng, n_in, precision)
    yv = rand_array(rng, m_out, precision)
    alpha, beta = _scalar(rng, precision), _scalar(rng, precision)
    a = _mat_buffer(ctx, av, precision, layout)
    x = make_buffer(ctx, xv, precision)
    y = make_buffer(ctx, yv, precision)
    tb.gemv(ctx, layout, trans, m, n, alpha, a, x, beta, y)
    _matvec_check(ctx, rng, precision, av, y.data, n_in, alpha, beta, xv, yv,
                  trans, f"gemv {precision} {layout} {trans}")


def case_gbmv(ctx, rng, precision):
    trans = rng.choice([Transpose.NO, Transpose.YES] +
                       ([Transpose.CONJUGATE] if precision.is_complex else []))
    m = int(rng.integers(2, 25))
    n = int(rng.integers(2, 25))
    kl = int(rng.integers(0, m))
    ku = int(rng.integers(0, n))
    band = rand_array(rng, (kl + ku + 1, n), precision)
    full = band_to_full(band, m, n, kl, ku)
    m_out, n_in = (m, n) if trans is Transpose.NO else (n, m)
    xv = rand_array(rng, n_in, precision)
    yv = rand_array(rng, m_out, precision)
    alpha, beta = _scalar(rng, precision), _scalar(rng, precision)
    a = make_buffer(ctx, band, precision)
    x = make_buffer(ctx, xv, precision)
    y = make_buffer(ctx, yv, precision)
    tb.gbmv(ctx, Layout.COL_MAJOR, trans, m, n, kl, ku, alpha, a, x, beta, y)
    _matvec_check(ctx, rng, precision, np.asarray(full), y.data, n_in, alpha,
                  beta, xv, yv, trans, f"gbmv {precision} {trans}")


def _sym_case(ctx, rng, precision, hermitian, fn):
    layout = rng.choice(LAYOUTS)
    triangle = rng.choice(TRIANGLES)
    n = int(rng.integers(1, 30))
    av = rand_array(rng, (n, n), precision)
    full = sym_to_full(av, triangle, hermitian)
    xv = rand_array(rng, n, precision)
    yv = rand_array(rng, n, precision)
    alpha, beta = _scalar(rng, precision), _scalar(rng, precision)
    a = _mat_buffer(ctx, av, precision, layout)
    x = make_buffer(ctx, xv, precision)
    y = make_buffer(ctx, yv, precision)
    fn(ctx, layout, triangle, n, alpha, a, x, beta, y)
    _matvec_check(ctx, rng, precision, np.asarray(full), y.data, n, alpha,
                  beta, xv, yv, Transpose.NO, f"{fn.__name__} {precision} {layout}")


def case_symv(ctx, rng, precision):
    _sym_case(ctx, rng, precision, False, tb.symv)


def case_hemv(ctx, rng, precision):
    _sym_case(ctx, rng, precision, True, tb.hemv)


def _band_sym_case(ctx, rng, precision, hermitian, fn):
    triangle = rng.choice(TRIANGLES)
    n = int(rng.integers(1, 25))
    k = int(rng.integers(0, n))
    band = rand_array(rng, (k + 1, n), precision)
    full = sym_band_to_full(band, n, k, triangle, hermitian)
    xv = rand_array(rng, n, precision)
    yv = rand_array(rng, n, precision)
    alpha, beta = _scalar(rng, precision), _scalar(rng, precision)
    a = make_buffer(ctx, band, precision)
    x = make_buffer(ctx, xv, precision)
    y = make_buffer(ctx, yv, precision)
    fn(ctx, Layout.COL_MAJOR, triangle, n, k, alpha, a, x, beta, y)
    _matvec_check(ctx, rng, precision, np.asarray(full), y.data, n, alpha,
                  beta, xv, yv, Transpose.NO, f"{fn.__name__} {precision}")


def case_sbmv(ctx, rng, precision):
    _band_sym_case(ctx, rng, precision, False, tb.sbmv)


def case_hbmv(ctx, rng, precision):
    _band_sym_case(ctx, rng, precision, True, tb.hbmv)


def _packed_sym_case(ctx, rng, precision, hermitian, fn):
    triangle = rng.choice(TRIANGLES)
    n = int(rng.integers(1, 25))
    ap = rand_array(rng, n * (n + 1) // 2, precision)
    full = packed_to_full(ap, n, triangle, "hermitian" if hermitian else "symmetric")
    xv = rand_array(rng, n, precision)
    yv = rand_array(rng, n, precision)
    alpha, beta = _scalar(rng, precision), _scalar(rng, precision)
    a = make_buffer(ctx, ap, precision)
    x = make_buffer(ctx, xv, precision)
    y = make_buffer(ctx, yv, precision)
    fn(ctx, Layout.COL_MAJOR, triangle, n, alpha, a, x, beta, y)
    _matvec_check(ctx, rng, precision, np.asarray(full), y.data, n, alpha,
                  beta, xv, yv, Transpose.NO, f"{fn.__name__} {precision}")


def case_spmv(ctx, rng, precision):
    _packed_sym_case(ctx, rng, precision, False, tb.spmv)


def case_hpmv(ctx, rng, precision):
    _packed_sym_case(ctx, rng, precision, True, tb.hpmv)


def _tri_flags(rng, precision):
    trans = rng.choice([Transpose.NO, Transpose.YES] +
                       ([Transpose.CONJUGATE] if precision.is_complex else []))
    return rng.choice(TRIANGLES), trans, rng.choice(DIAGONALS)


def case_trmv(ctx, rng, precision):
    layout = rng.choice(LAYOUTS)
    triangle, trans, diagonal = _tri_flags(rng, precision)
    n = int(rng.integers(1, 30))
    av = rand_array(rng, (n, n), precision)
    full = tri_to_full(av, triangle, diagonal)
    xv = rand_array(rng, n, precision)
    a = _mat_buffer(ctx, av, precision, layout)
    x = make_buffer(ctx, xv, precision)
    tb.trmv(ctx, layout, triangle, trans, diagonal, n, a, x)
    _matvec_check(ctx, rng, precision, np.asarray(full), x.data, n, 1, 0, xv,
                  xv, trans, f"trmv {precision} {layout}")


def case_tbmv(ctx, rng, precision):
    triangle, trans, diagonal = _tri_flags(rng, precision)
    n = int(rng.integers(1, 25))
    k = int(rng.integers(0, n))
    band = rand_array(rng, (k + 1, n), precision)
    full = np.zeros((n, n), dtype=precision.dtype)
    for j in range(n):
        if triangle is Triangle.UPPER:
            for i in range(max(0, j - k), j + 1):
                full[i, j] = band[k + i - j, j]
        else:
            for i in range(j, min(n, j + k + 1)):
                full[i, j] = band[i - j, j]
    if diagonal is Diagonal.UNIT:
        np.fill_diagonal(full, 1)
    xv = rand_array(rng, n, precision)
    a = make_buffer(ctx, band, precision)
    x = make_buffer(ctx, xv, precision)
    tb.tbmv(ctx, Layout.COL_MAJOR, triangle, trans, diagonal, n, k, a, x)
    _matvec_check(ctx, rng, precision, full, x.data, n, 1, 0, xv, xv, trans,
                  f"tbmv {precision}")


def case_tpmv(ctx, rng, precision):
    triangle, trans, diagonal = _tri_flags(rng, precision)
    n = int(rng.integers(1, 25))
    ap = rand_array(rng, n * (n + 1) // 2, precision)
    full = packed_to_full(ap, n, triangle, "triangular", diagonal)
    xv = rand_array(rng, n, precision)
    a = make_buffer(ctx, ap, precision)
    x = make_buffer(ctx, xv, precision)
    tb.tpmv(ctx, Layout.COL_MAJOR, triangle, trans, diagonal, n, a, x)
    _matvec_check(ctx, rng, precision, np.asarray(full), x.data, n, 1, 0, xv,
                  xv, trans, f"tpmv {precision}")


def case_trsv(ctx, rng, precision):
    layout = rng.choice(LAYOUTS)
    triangle, trans, diagonal = _tri_flags(rng, precision)
    n = int(rng.integers(1, 25))
    av = rand_array(rng, (n, n), precision)
    ii = np.arange(n)
    av[ii, ii] = av[ii, ii] + np.sign(av[ii, ii].real + 0.1) * 2
    bv = rand_array(rng, n, precision)
    a = _mat_buffer(ctx, av, precision, layout)
    x = make_buffer(ctx, bv, precision)
    tb.trsv(ctx, layout, triangle, trans, diagonal, n, a, x)
    full = tri_to_full(av, triangle, diagonal).astype(np.complex128)
    if trans is Transpose.YES:
        full = full.T
    elif trans is Transpose.CONJUGATE:
        full = np.conj(full.T)
    residual = np.abs(full @ x.data.astype(np.complex128) - bv.astype(np.complex128))
    bnorm = float(np.max(np.abs(bv))) if n else 0.0
    xnorm = float(np.max(np.abs(x.data.astype(np.complex128))))
    limit = 8 * EPS[precision] * max(n, 1) * max(bnorm, xnorm) + 1e-30
    assert float(residual.max()) <= limit, f"trsv residual {residual.max()} > {limit}"


def case_ger(ctx, rng, precision):
    layout = rng.choice(LAYOUTS)
    m, n = int(rng.integers(1, 40)), int(rng.integers(1, 40))
    alpha = _scalar(rng, precision)
    av = rand_array(rng, (m, n), precision)
    xv = rand_array(rng, m, precision)
    yv = rand_array(rng, n, precision)
    a = _mat_buffer(ctx, av, precision, layout)
    x = make_buffer(ctx, xv, precision)
    y = make_buffer(ctx, yv, precision)
    tb.ger(ctx, layout, m, n, alpha, x, y, a)
    want = av.astype(np.complex128) + alpha * np.outer(xv, yv)
    tol = 8 * EPS[precision] * (np.abs(want) + np.abs(np.outer(xv, yv)) + 1e-3)
    assert_close(_read_mat(a, m, n, layout), want, tol, context=f"ger {precision}")


def _geru_gerc(ctx, rng, precision, conj):
    layout = rng.choice(LAYOUTS)
    m, n = int(rng.integers(1, 40)), int(rng.integers(1, 40))
    alpha = _scalar(rng, precision)
    av = rand_array(rng, (m, n), precision)
    xv = rand_array(rng, m, precision)
    yv = rand_array(rng, n, precision)
    a = _mat_buffer(ctx, av, precision, layout)
    x = make_buffer(ctx, xv, precision)
    y = make_buffer(ctx, yv, precision)
    (tb.gerc if conj else tb.geru)(ctx, layout, m, n, alpha, x, y, a)
    yy = np.conj(yv) if conj else yv
    want = av.astype(np.complex128) + alpha * np.outer(xv, yy)
    tol = 8 * EPS[precision] * (np.abs(want) + np.abs(np.outer(xv, yy)) + 1e-3)
    assert_close(_read_mat(a, m, n, layout), want, tol,
                 context=f"{'gerc' if conj else 'geru'}")


def case_geru(ctx, rng, precision):
    _geru_gerc(ctx, rng, precision, False)


def case_gerc(ctx, rng, precision):
    _geru_gerc(ctx, rng, precision, True)


def _tri_mask(n, triangle):
    ii = np.arange(n)[:, None]
    jj = np.arange(n)[None, :]
    return (ii <= jj) if triangle is Triangle.UPPER else (ii >= jj)


def _dense_rank_case(ctx, rng, precision, fn, rank2, hermitian):
    layout = rng.choice(LAYOUTS)
    triangle = rng.choice(TRIANGLES)
    n = int(rng.integers(1, 25))
    alpha = _scalar(rng, precision, real=hermitian and not rank2)
    av = rand_array(rng, (n, n), precision)
    xv = rand_array(rng, n, precision)
    yv = rand_array(rng, n, precision)
    a = _mat_buffer(ctx, av, precision, layout)
    x = make_buffer(ctx, xv, precision)
    if rank2:
        y = make_buffer(ctx, yv, precision)
        fn(ctx, layout, triangle, n, alpha, x, y, a)
    else:
        fn(ctx, layout, triangle, n, alpha, x, a)
    before = sym_to_full(av, triangle, hermitian).astype(np.complex128)
    if hermitian and rank2:
        upd = alpha * np.outer(xv, np.conj(yv)) + np.conj(alpha) * np.outer(yv, np.conj(xv))
    elif hermitian:
        upd = alpha * np.outer(xv, np.conj(xv))
    elif rank2:
        upd = alpha * (np.outer(xv, yv) + np.outer(yv, xv))
    else:
        upd = alpha * np.outer(xv, xv)
    want = before + upd
    got = _read_mat(a, n, n, layout)
    mask = _tri_mask(n, triangle)
    tol = 8 * EPS[precision] * (np.abs(want) + np.abs(upd) + 1e-3)
    assert_close(got[mask], want[mask], tol[mask], context=fn.__name__)
    if hermitian:
        ii = np.arange(n)
        assert np.all(got[ii, ii].imag == 0)


def case_syr(ctx, rng, precision):
    _dense_rank_case(ctx, rng, precision, tb.syr, False, False)


def case_syr2(ctx, rng, precision):
    _dense_rank_case(ctx, rng, precision, tb.syr2, True, False)


def case_her(ctx, rng, precision):
    _dense_rank_case(ctx, rng, precision, tb.her, False, True)


def case_her2(ctx, rng, precision):
    _dense_rank_case(ctx, rng, precision, tb.her2, True, True)


def _packed_rank_case(ctx, rng, precision, fn, rank2, hermitian):
    triangle = rng.choice(TRIANGLES)
    n = int(rng.integers(1, 25))
    alpha = _scalar(rng, precision, real=hermitian and not rank2)
    apv = rand_array(rng, n * (n + 1) // 2, precision)
    xv = rand_array(rng, n, precision)
    yv = rand_array(rng, n, precision)
    ap = make_buffer(ctx, apv, precision)
    x = make_buffer(ctx, xv, precision)
    if rank2:
        y = make_buffer(ctx, yv, precision)
        fn(ctx, Layout.COL_MAJOR, triangle, n, alpha, x, y, ap)
    else:
        fn(ctx, Layout.COL_MAJOR, triangle, n, alpha, x, ap)
    kind = "hermitian" if hermitian else "symmetric"
    before = packed_to_full(apv, n, triangle, kind).astype(np.complex128)
    if hermitian and rank2:
        upd = alpha * np.outer(xv, np.conj(yv)) + np.conj(alpha) * np.outer(yv, np.conj(xv))
    elif hermitian:
        upd = alpha * np.outer(xv, np.conj(xv))
    elif rank2:
        upd = alpha * (np.outer(xv, yv) + np.outer(yv, xv))
    else:
        upd = alpha * np.outer(xv, xv)
    want = before + upd
    got = packed_to_full(ap.data[: n * (n + 1) // 2], n, triangle, kind)
    mask = _tri_mask(n, triangle)
    tol = 8 * EPS[precision] * (np.abs(want) + np.abs(upd) + 1e-3)
    assert_close(np.asarray(got)[mask], want[mask], tol[mask], context=fn.__name__)


def case_spr(ctx, rng, precision):
    _packed_rank_case(ctx, rng, precision, tb.spr, False, False)


def case_spr2(ctx, rng, precision):
    _packed_rank_case(ctx, rng, precision, tb.spr2, True, False)


def case_hpr(ctx, rng, precision):
    _packed_rank_case(ctx, rng, precision, tb.hpr, False, True)


def case_hpr2(ctx, rng, precision):
    _packed_rank_case(ctx, rng, precision, tb.hpr2, True, True)


# ---------------------------------------------------------------------------
# Level 3
# ---------------------------------------------------------------------------

def _gemm_tol_full(alpha, av, bv, beta, cv, precision, ta, tb_):
    tol = np.abs(alpha) * gemm_tol(av, bv, precision, ta, tb_)
    if beta != 0:
        tol = tol + 4 * EPS[precision] * np.abs(beta * np.asarray(cv, dtype=np.complex128))
    return tol + 1e-30


def case_gemm(ctx, rng, precision):
    layout = rng.choice(LAYOUTS)
    choices = [Transpose.NO, Transpose.YES] + \
        ([Transpose.CONJUGATE] if precision.is_complex else [])
    ta, tb_ = rng.choice(choices), rng.choice(choices)
    m = _size(rng, odd_multiples=True, hi=48)
    n = _size(rng, odd_multiples=True, hi=48)
    k = _size(rng, odd_multiples=True, hi=48)
    av = rand_array(rng, (m, k) if ta is Transpose.NO else (k, m), precision)
    bv = rand_array(rng, (k, n) if tb_ is Transpose.NO else (n, k), precision)
    cv = rand_array(rng, (m, n), precision)
    alpha, beta = _scalar(rng, precision), _scalar(rng, precision)
    a = _mat_buffer(ctx, av, precision, layout)
    b = _mat_buffer(ctx, bv, precision, layout)
    c = _mat_buffer(ctx, cv, precision, layout)
    tb.gemm(ctx, layout, ta, tb_, m, n, k, alpha, a, b, beta, c)
    want = gemm_oracle(alpha, av, bv, beta, cv, precision, ta, tb_)
    assert_close(_read_mat(c, m, n, layout), want,
                 _gemm_tol_full(alpha, av, bv, beta, cv, precision, ta, tb_),
                 context=f"gemm {precision} {layout} {ta} {tb_} {m}x{n}x{k}")


def _symm_hemm_case(ctx, rng, precision, hermitian):
    layout = rng.choice(LAYOUTS)
    side = rng.choice([Side.LEFT, Side.RIGHT])
    triangle = rng.choice(TRIANGLES)
    m, n = int(rng.integers(1, 30)), int(rng.integers(1, 30))
    na = m if side is Side.LEFT else n
    av = rand_array(rng, (na, na), precision)
    bv = rand_array(rng, (m, n), precision)
    cv = rand_array(rng, (m, n), precision)
    alpha, beta = _scalar(rng, precision), _scalar(rng, precision)
    a = _mat_buffer(ctx, av, precision, layout)
    b = _mat_buffer(ctx, bv, precision, layout)
    c = _mat_buffer(ctx, cv, precision, layout)
    fn = tb.hemm if hermitian else tb.symm
    fn(ctx, layout, side, triangle, m, n, alpha, a, b, beta, c)
    full = np.asarray(sym_to_full(av, triangle, hermitian), dtype=np.complex128)
    prod = full @ bv.astype(np.complex128) if side is Side.LEFT \
        else bv.astype(np.complex128) @ full
    want = alpha * prod + beta * cv.astype(np.complex128)
    tol = (np.abs(alpha) * 4 * EPS[precision] * na * (np.abs(prod) + na / 4 + 1)
           + 4 * EPS[precision] * np.abs(beta * cv.astype(np.complex128)) + 1e-30)
    assert_close(_read_mat(c, m, n, layout), want, tol, context=fn.__name__)


def case_symm(ctx, rng, precision):
    _symm_hemm_case(ctx, rng, precision, False)


def case_hemm(ctx, rng, precision):
    _symm_hemm_case(ctx, rng, precision, True)


def _rank_k_case(ctx, rng, precision, fn, hermitian, rank2):
    layout = rng.choice(LAYOUTS)
    triangle = rng.choice(TRIANGLES)
    trans = rng.choice([Transpose.NO, Transpose.YES]) if not hermitian \
        else rng.choice([Transpose.NO, Transpose.CONJUGATE])
    n, k = int(rng.integers(1, 25)), int(rng.integers(1, 25))
    shape = (n, k) if trans is Transpose.NO else (k, n)
    av = rand_array(rng, shape, precision)
    bv = rand_array(rng, shape, precision)
    cv = rand_array(rng, (n, n), precision)
    if hermitian:
        ii = np.arange(n)
        cv[ii, ii] = cv[ii, ii].real
    alpha = _scalar(rng, precision, real=hermitian and not rank2)
    beta = _scalar(rng, precision, real=hermitian)
    a = _mat_buffer(ctx, av, precision, layout)
    c = _mat_buffer(ctx, cv, precision, layout)
    if rank2:
        b = _mat_buffer(ctx, bv, precision, layout)
        fn(ctx, layout, triangle, trans, n, k, alpha, a, b, beta, c)
    else:
        fn(ctx, layout, triangle, trans, n, k, alpha, a, beta, c)

    aw = av.astype(np.complex128)
    bw = bv.astype(np.complex128)
    if hermitian:
        op_a = aw if trans is Transpose.NO else np.conj(aw.T)
        op_b = bw if trans is Transpose.NO else np.conj(bw.T)
        if rank2:
            prod = alpha * (op_a @ np.conj(op_b.T)) + \
                np.conj(alpha) * (op_b @ np.conj(op_a.T))
        else:
            prod = alpha * (op_a @ np.conj(op_a.T))
    else:
        op_a = aw if trans is Transpose.NO else aw.T
        op_b = bw if trans is Transpose.NO else bw.T
        if rank2:
            prod = alpha * (op_a @ op_b.T + op_b @ op_a.T)
        else:
            prod = alpha * (op_a @ op_a.T)
    want = prod + beta * cv.astype(np.complex128)
    got = _read_mat(c, n, n, layout)
    mask = _tri_mask(n, triangle)
    scale = np.abs(prod) + np.abs(beta * cv) + k / 2 + 1
    tol = 8 * EPS[precision] * max(k, 1) * scale
    assert_close(got[mask], want[mask], tol[mask], context=fn.__name__)
    if hermitian:
        ii = np.arange(n)
        assert np.all(got[ii, ii].imag == 0)


def case_syrk(ctx, rng, precision):
    _rank_k_case(ctx, rng, precision, tb.syrk, False, False)


def case_herk(ctx, rng, precision):
    _rank_k_case(ctx, rng, precision, tb.herk, True, False)


def case_syr2k(ctx, rng, precision):
    _rank_k_case(ctx, rng, precision, tb.syr2k, False, True)


def case_her2k(ctx, rng, precision):
    _rank_k_case(ctx, rng, precision, tb.her2k, True, True)


def case_trmm(ctx, rng, precision):
    layout = rng.choice(LAYOUTS)
    side = rng.choice([Side.LEFT, Side.RIGHT])
    triangle, trans, diagonal = _tri_flags(rng, precision)
    m, n = int(rng.integers(1, 25)), int(rng.integers(1, 25))
    na = m if side is Side.LEFT else n
    av = rand_array(rng, (na, na), precision)
    bv = rand_array(rng, (m, n), precision)
    alpha = _scalar(rng, precision)
    a = _mat_buffer(ctx, av, precision, layout)
    b = _mat_buffer(ctx, bv, precision, layout)
    tb.trmm(ctx, layout, side, triangle, trans, diagonal, m, n, alpha, a, b)
    full = np.asarray(tri_to_full(av, triangle, diagonal), dtype=np.complex128)
    if trans is Transpose.YES:
        full = full.T
    elif trans is Transpose.CONJUGATE:
        full = np.conj(full.T)
    want = alpha * (full @ bv.astype(np.complex128)) if side is Side.LEFT \
        else alpha * (bv.astype(np.complex128) @ full)
    tol = 4 * EPS[precision] * max(na, 1) * (np.abs(want) + np.abs(alpha) * na + 4)
    assert_close(_read_mat(b, m, n, layout), want, tol, context="trmm")


def case_trsm(ctx, rng, precision):
    layout = rng.choice(LAYOUTS)
    side = rng.choice([Side.LEFT, Side.RIGHT])
    triangle, trans, diagonal = _tri_flags(rng, precision)
    m, n = int(rng.integers(1, 40)), int(rng.integers(1, 20))
    na = m if side is Side.LEFT else n
    av = rand_array(rng, (na, na), precision)
    ii = np.arange(na)
    av[ii, ii] = av[ii, ii] + np.sign(av[ii, ii].real + 0.1) * 2
    bv = rand_array(rng, (m, n), precision)
    alpha = _scalar(rng, precision)
    a = _mat_buffer(ctx, av, precision, layout)
    b = _mat_buffer(ctx, bv, precision, layout)
    tb.trsm(ctx, layout, side, triangle, trans, diagonal, m, n, alpha, a, b,
            block_size=8)
    full = np.asarray(tri_to_full(av, triangle, diagonal), dtype=np.complex128)
    if trans is Transpose.YES:
        full = full.T
    elif trans is Transpose.CONJUGATE:
        full = np.conj(full.T)
    x = _read_mat(b, m, n, layout).astype(np.complex128)
    lhs = full @ x if side is Side.LEFT else x @ full
    rhs = alpha * bv.astype(np.complex128)
    rnorm = float(np.max(np.abs(rhs))) if rhs.size else 0.0
    xnorm = float(np.max(np.abs(x))) if x.size else 0.0
    limit = 8 * EPS[precision] * max(na, 1) * max(rnorm, xnorm, 1e-3)
    assert float(np.abs(lhs - rhs).max()) <= limit, "trsm residual too large"


# ---------------------------------------------------------------------------
# Extras
# ---------------------------------------------------------------------------

def case_omatcopy(ctx, rng, precision):
    layout = rng.choice(LAYOUTS)
    trans = rng.choice([Transpose.NO, Transpose.YES] +
                       ([Transpose.CONJUGATE] if precision.is_complex else []))
    m, n = int(rng.integers(1, 40)), int(rng.integers(1, 40))
    alpha = _scalar(rng, precision)
    av = rand_array(rng, (m, n), precision)
    a = _mat_buffer(ctx, av, precision, layout)
    out_shape = (m, n) if trans is Transpose.NO else (n, m)
    b = tb.buffer_alloc(ctx, precision, m * n)
    tb.omatcopy(ctx, layout, trans, m, n, alpha, a, b)
    aw = av.astype(np.complex128)
    if trans is Transpose.YES:
        aw = aw.T
    elif trans is Transpose.CONJUGATE:
        aw = np.conj(aw.T)
    want = alpha * aw
    tol = 4 * EPS[precision] * (np.abs(want) + 1e-3)
    assert_close(_read_mat(b, out_shape[0], out_shape[1], layout), want, tol,
                 context="omatcopy")


def case_im2col(ctx, rng, precision):
    c_, h, w = int(rng.integers(1, 4)), int(rng.integers(3, 9)), int(rng.integers(3, 9))
    kh, kw = int(rng.integers(1, min(4, h + 1))), int(rng.integers(1, min(4, w + 1)))
    ph, pw = int(rng.integers(0, 2)), int(rng.integers(0, 2))
    sh, sw = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    image = rand_array(rng, (c_, h, w), precision)
    weights = rand_array(rng, (c_, kh, kw), precision)
    out_h = (h + 2 * ph - kh) // sh + 1
    out_w = (w + 2 * pw - kw) // sw + 1
    if out_h <= 0 or out_w <= 0:
        return
    im = make_buffer(ctx, image.ravel(), precision)
    col = tb.buffer_alloc(ctx, precision, c_ * kh * kw * out_h * out_w)
    tb.im2col(ctx, c_, h, w, kh, kw, ph, pw, sh, sw, 1, 1, im, col)
    colm = _read_mat(col, c_ * kh * kw, out_h * out_w, Layout.COL_MAJOR)
    got = (weights.reshape(1, -1).astype(np.complex128) @
           colm.astype(np.complex128)).reshape(out_h, out_w)
    if precision.is_complex:
        want = (conv2d_oracle(image.real, weights.real, (ph, pw), (sh, sw), (1, 1))
                - conv2d_oracle(image.imag, weights.imag, (ph, pw), (sh, sw), (1, 1))
                + 1j * (conv2d_oracle(image.real, weights.imag, (ph, pw), (sh, sw), (1, 1))
                        + conv2d_oracle(image.imag, weights.real, (ph, pw), (sh, sw), (1, 1))))
    else:
        want = conv2d_oracle(image.astype(np.float64), weights.astype(np.float64),
                             (ph, pw), (sh, sw), (1, 1))
    tol = 8 * EPS[precision] * c_ * kh * kw * (np.abs(want) + 4)
    assert_close(got, want, tol, context="im2col")


def case_axpy_batched(ctx, rng, precision):
    n = int(rng.integers(1, 60))
    batch = int(rng.integers(1, 6))
    alphas = [_scalar(rng, precision) for _ in range(batch)]
    xv = rand_array(rng, batch * n, precision)
    yv = rand_array(rng, batch * n, precision)
    offs = [i * n for i in range(batch)]
    x1, y1 = make_buffer(ctx, xv, precision), make_buffer(ctx, yv, precision)
    tb.axpy_batched(ctx, n, alphas, x1, offs, y1, offs, batch)
    x2, y2 = make_buffer(ctx, xv, precision), make_buffer(ctx, yv, precision)
    for i in range(batch):
        tb.axpy(ctx, n, alphas[i], x2, y2, x_offset=offs[i], y_offset=offs[i])
    assert y1.data.tobytes() == y2.data.tobytes(), "batched axpy != looped"


def case_gemm_batched(ctx, rng, precision):
    m, n, k = (int(rng.integers(1, 24)) for _ in range(3))
    batch = int(rng.integers(1, 5))
    alphas = [_scalar(rng, precision) for _ in range(batch)]
    betas = [_scalar(rng, precision) for _ in range(batch)]
    ea, eb, ec = m * k, k * n, m * n
    av = rand_array(rng, batch * ea, precision)
    bv = rand_array(rng, batch * eb, precision)
    cv = rand_array(rng, batch * ec, precision)
    ao = [i * ea for i in range(batch)]
    bo = [i * eb for i in range(batch)]
    co = [i * ec for i in range(batch)]
    a1, b1 = make_buffer(ctx, av, precision), make_buffer(ctx, bv, precision)
    c1 = make_buffer(ctx, cv, precision)
    tb.gemm_batched(ctx, Layout.COL_MAJOR, Transpose.NO, Transpose.NO, m, n, k,
                    alphas, a1, ao, b1, bo, betas, c1, co, batch)
    a2, b2 = make_buffer(ctx, av, precision), make_buffer(ctx, bv, precision)
    c2 = make_buffer(ctx, cv, precision)
    for i in range(batch):
        tb.gemm(ctx, Layout.COL_MAJOR, Transpose.NO, Transpose.NO, m, n, k,
                alphas[i], a2, b2, betas[i], c2, a_offset=ao[i],
                b_offset=bo[i], c_offset=co[i])
    assert c1.data.tobytes() == c2.data.tobytes(), "batched gemm != looped"


def case_gemm_strided_batched(ctx, rng, precision):
    m, n, k = (int(rng.integers(1, 20)) for _ in range(3))
    batch = int(rng.integers(1, 5))
    alpha, beta = _scalar(rng, precision), _scalar(rng, precision)
    ea, eb, ec = m * k, k * n, m * n
    av = rand_array(rng, batch * ea, precision)
    bv = rand_array(rng, batch * eb, precision)
    cv = rand_array(rng, batch * ec, precision)
    a1, b1 = make_buffer(ctx, av, precision), make_buffer(ctx, bv, precision)
    c1 = make_buffer(ctx, cv, precision)
    tb.gemm_strided_batched(ctx, Layout.COL_MAJOR, Transpose.NO, Transpose.NO,
                            m, n, k, alpha, a1, ea, b1, eb, beta, c1, ec, batch)
    a2, b2 = make_buffer(ctx, av, precision), make_buffer(ctx, bv, precision)
    c2 = make_buffer(ctx, cv, precision)
    for i in range(batch):
        tb.gemm(ctx, Layout.COL_MAJOR, Transpose.NO, Transpose.NO, m, n, k,
                alpha, a2, b2, beta, c2, a_offset=i * ea, b_offset=i * eb,
                c_offset=i * ec)
    assert c1.data.tobytes() == c2.data.tobytes(), "strided batched != looped"


#: routine name -> (case function, applicable precisions)
ROUTINES = {
    # level 1
    "axpy": (case_axpy, ALL5),
    "copy": (case_copy, ALL5),
    "scal": (case_scal, ALL5),
    "swap": (case_swap, ALL5),
    "amax": (case_amax, ALL5),
    "asum": (case_asum, ALL5),
    "dot": (case_dot, REAL),
    "dotc": (case_dotc, CPLX),
    "dotu": (case_dotu, CPLX),
    "nrm2": (case_nrm2, ALL5),
    # level 2
    "gbmv": (case_gbmv, ALL5),
    "gemv": (case_gemv, ALL5),
    "hbmv": (case_hbmv, CPLX),
    "hemv": (case_hemv, CPLX),
    "hpmv": (case_hpmv, CPLX),
    "sbmv": (case_sbmv, REAL),
    "spmv": (case_spmv, REAL),
    "symv": (case_symv, REAL),
    "tbmv": (case_tbmv, ALL5),
    "tpmv": (case_tpmv, ALL5),
    "trmv": (case_trmv, ALL5),
    "trsv": (case_trsv, ALL5),
    "ger": (case_ger, REAL),
    "gerc": (case_gerc, CPLX),
    "geru": (case_geru, CPLX),
    "her": (case_her, CPLX),
    "her2": (case_her2, CPLX),
    "hpr": (case_hpr, CPLX),
    "hpr2": (case_hpr2, CPLX),
    "spr": (case_spr, REAL),
    "spr2": (case_spr2, REAL),
    "syr": (case_syr, REAL),
    "syr2": (case_syr2, REAL),
    # level 3
    "gemm": (case_gemm, ALL5),
    "hemm": (case_hemm, CPLX),
    "her2k": (case_her2k, CPLX),
    "herk": (case_herk, CPLX),
    "symm": (case_symm, ALL5),
    "syr2k": (case_syr2k, ALL5),
    "syrk": (case_syrk, ALL5),
    "trmm": (case_trmm, ALL5),
    "trsm": (case_trsm, ALL5),
    # extras
    "sum": (case_sum, ALL5),
    "max": (case_max, REAL),
    "min": (case_min, REAL),
    "amin": (case_amin, ALL5),
    "omatcopy": (case_omatcopy, ALL5),
    "im2col": (case_im2col, ALL5),
    "axpy_batched": (case_axpy_batched, ALL5),
    "gemm_batched": (case_gemm_batched, ALL5),
    "gemm_strided_batched": (case_gemm_strided_batched, ALL5),
}

assert len(ROUTINES) == 51
