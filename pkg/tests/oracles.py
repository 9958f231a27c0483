"""Independent test oracles: plain numpy/loop implementations and tolerances.

These deliberately avoid the library's kernel machinery.  Matrix math runs in
float64/complex128 (a strictly more accurate route) unless a test needs
same-dtype semantics for underflow-sensitive cases, where explicit loops in
the storage dtype are used.
"""

from __future__ import annotations

import numpy as np

from tunedblas import Diagonal, Precision, Transpose, Triangle

EPS = {
    Precision.H: 2.0 ** -10,
    Precision.S: 2.0 ** -23,
    Precision.D: 2.0 ** -52,
    Precision.C: 2.0 ** -23,
    Precision.Z: 2.0 ** -52,
}

WIDE = {
    Precision.H: np.float64,
    Precision.S: np.float64,
    Precision.D: np.float64,
    Precision.C: np.complex128,
    Precision.Z: np.complex128,
}


def wide(arr, precision):
    return np.asarray(arr).astype(WIDE[precision])


def apply_op(a: np.ndarray, trans: Transpose) -> np.ndarray:
    if trans is Transpose.NO:
        return a
    if trans is Transpose.YES:
        return a.T
    return np.conj(a.T)


def gemm_oracle(alpha, a, b, beta, c, precision, trans_a=Transpose.NO,
                trans_b=Transpose.NO):
    aw = apply_op(wide(a, precision), trans_a)
    bw = apply_op(wide(b, precision), trans_b)
    out = alpha * (aw @ bw)
    if beta != 0:
        out = out + beta * wide(c, precision)
    return out


def gemv_oracle(alpha, a, x, beta, y, precision, trans=Transpose.NO):
    aw = apply_op(wide(a, precision), trans)
    out = alpha * (aw @ wide(x, precision))
    if beta != 0:
        out = out + beta * wide(y, precision)
    return out


def gemm_tol(a, b, precision, trans_a=Transpose.NO, trans_b=Transpose.NO):
    """Per-element 4*eps*K*max_k |a_ik| |b_kj| for C = op(a) op(b)."""
    aw = np.abs(apply_op(np.asarray(a, dtype=np.complex128), trans_a))
    bw = np.abs(apply_op(np.asarray(b, dtype=np.complex128), trans_b))
    k = aw.shape[1]
    m, n = aw.shape[0], bw.shape[1]
    bound = np.empty((m, n))
    block = max(1, (1 << 22) // max(1, n * k))
    for r0 in range(0, m, block):
        r1 = min(r0 + block, m)
        bound[r0:r1] = np.max(aw[r0:r1, :, None].real * bw[None, :, :].real, axis=1)
    return 4.0 * EPS[precision] * max(k, 1) * bound


def reduce_tol(x, y, precision):
    if np.asarray(x).size == 0:
        return 0.0
    xv = np.abs(np.asarray(x, dtype=np.complex128)).real
    yv = xv if y is None else np.abs(np.asarray(y, dtype=np.complex128)).real
    return 4.0 * EPS[precision] * xv.size * float(np.max(xv * yv))


def matvec_tol(a, x, precision):
    return gemm_tol(a, np.asarray(x)[:, None], precision)[:, 0]


def assert_close(actual, expected, tol, scale=1.0, context=""):
    actual = np.asarray(actual, dtype=np.complex128)
    expected = np.asarray(expected, dtype=np.complex128)
    limit = scale * np.asarray(tol, dtype=np.float64) + 1e-30
    diff = np.abs(actual - expected)
    if not np.all(diff <= limit):
        worst = float(np.max(diff - limit))
        raise AssertionError(
            f"{context} mismatch: worst excess {worst:.3e}, max diff "
            f"{float(diff.max()):.3e}, max tol {float(np.max(limit)):.3e}"
        )


# ---------------------------------------------------------------------------
# Structured-storage materializers (loop-based, independent of the library)
# ---------------------------------------------------------------------------

def band_to_full(band, m, n, kl, ku):
    full = np.zeros((m, n), dtype=band.dtype)
    for j in range(n):
        for i in range(max(0, j - ku), min(m, j + kl + 1)):
            full[i, j] = band[ku + i - j, j]
    return full


def sym_band_to_full(band, n, k, triangle, hermitian=False):
    full = np.zeros((n, n), dtype=band.dtype)
    for j in range(n):
        if triangle is Triangle.UPPER:
            rng = range(max(0, j - k), j + 1)
            for i in rng:
                full[i, j] = band[k + i - j, j]
        else:
            for i in range(j, min(n, j + k + 1)):
                full[i, j] = band[i - j, j]
    for i in range(n):
        for j in range(n):
            stored = (i <= j) if triangle is Triangle.UPPER else (i >= j)
            if not stored:
                full[i, j] = np.conj(full[j, i]) if hermitian else full[j, i]
    if hermitian:
        for i in range(n):
            full[i, i] = full[i, i].real
    return full


def packed_to_full(ap, n, triangle, kind="symmetric", diagonal=Diagonal.NON_UNIT):
    """kind: symmetric | hermitian | triangular."""
    full = np.zeros((n, n), dtype=ap.dtype)
    idx = 0
    if triangle is Triangle.UPPER:
        for j in range(n):
            for i in range(j + 1):
                full[i, j] = ap[idx]
                idx += 1
    else:
        for j in range(n):
            for i in range(j, n):
                full[i, j] = ap[idx]
                idx += 1
    if kind == "triangular":
        if diagonal is Diagonal.UNIT:
            np.fill_diagonal(full, 1)
        return full
    for i in range(n):
        for j in range(n):
            stored = (i <= j) if triangle is Triangle.UPPER else (i >= j)
            if not stored:
                full[i, j] = np.conj(full[j, i]) if kind == "hermitian" else full[j, i]
    if kind == "hermitian":
        for i in range(n):
            full[i, i] = full[i, i].real
    return full


def sym_to_full(a, triangle, hermitian=False):
    n = a.shape[0]
    full = np.array(a, copy=True)
    for i in range(n):
        for j in range(n):
            stored = (i <= j) if triangle is Triangle.UPPER else (i >= j)
            if not stored:
                full[i, j] = np.conj(full[j, i]) if hermitian else full[j, i]
    if hermitian:
        for i in range(n):
            full[i, i] = full[i, i].real
    return full


def tri_to_full(a, triangle, diagonal):
    n = a.shape[0]
    full = np.zeros_like(np.asarray(a))
    for i in range(n):
        for j in range(n):
            if (i <= j) if triangle is Triangle.UPPER else (i >= j):
                full[i, j] = a[i, j]
    if diagonal is Diagonal.UNIT:
        np.fill_diagonal(full, 1)
    return full


def conv2d_oracle(image, weights, pad, stride, dilation):
    """Direct cross-correlation; image (c, h, w), weights (c, kh, kw)."""
    c, h, w = image.shape
    _, kh, kw = weights.shape
    ph, pw = pad
    sh, sw = stride
    dh, dw = dilation
    out_h = (h + 2 * ph - (dh * (kh - 1) + 1)) // sh + 1
    out_w = (w + 2 * pw - (dw * (kw - 1) + 1)) // sw + 1
    padded = np.zeros((c, h + 2 * ph, w + 2 * pw), dtype=np.float64)
    padded[:, ph : ph + h, pw : pw + w] = image
    out = np.zeros((out_h, out_w), dtype=np.float64)
    for oy in range(out_h):
        for ox in range(out_w):
            acc = 0.0
            for ci in range(c):
                for ky in range(kh):
                    for kx in range(kw):
                        acc += (padded[ci, oy * sh + ky * dh, ox * sw + kx * dw]
                                * weights[ci, ky, kx])
            out[oy, ox] = acc
    return out
