"""Naive reference implementations and the numerical tolerance model.

The tuner verifies every candidate configuration against these before timing
it, and the benchmark clients use them both as the comparison baseline and as
the correctness gate.  They are deliberately plain: single numpy calls with no
tiling, staging or padding, evaluated in the precision's compute dtype.
"""

from __future__ import annotations

import numpy as np

from .core import Precision

__all__ = [
    "ref_axpy",
    "ref_gemv",
    "ref_ger",
    "ref_gemm",
    "ref_dot",
    "gemm_tolerance",
    "reduction_tolerance",
    "allclose_tol",
]


def ref_axpy(alpha, x: np.ndarray, y: np.ndarray, precision: Precision) -> np.ndarray:
    cdt = precision.compute_dtype
    out = y.astype(cdt) + alpha * x.astype(cdt)
    return out.astype(precision.dtype)


def ref_dot(x: np.ndarray, y: np.ndarray, precision: Precision):
    cdt = precision.compute_dtype
    return np.dot(x.astype(cdt), y.astype(cdt))


def ref_gemv(alpha, a: np.ndarray, x: np.ndarray, beta, y: np.ndarray,
             precision: Precision) -> np.ndarray:
    cdt = precision.compute_dtype
    out = alpha * (a.astype(cdt) @ x.astype(cdt)) + beta * y.astype(cdt)
    return out.astype(precision.dtype)


def ref_ger(alpha, x: np.ndarray, y: np.ndarray, a: np.ndarray,
            precision: Precision) -> np.ndarray:
    cdt = precision.compute_dtype
    out = a.astype(cdt) + alpha * np.outer(x.astype(cdt), y.astype(cdt))
    return out.astype(precision.dtype)


def ref_gemm(alpha, a: np.ndarray, b: np.ndarray, beta, c: np.ndarray,
             precision: Precision) -> np.ndarray:
    """C = alpha*a@b + beta*c on plain arrays (a is m x k, b is k x n)."""
    cdt = precision.compute_dtype
    prod = a.astype(cdt) @ b.astype(cdt)
    if beta == 0:
        out = alpha * prod
    else:
        out = alpha * prod + beta * c.astype(cdt)
    return out.astype(precision.dtype)


# ---------------------------------------------------------------------------
# Tolerances
# ---------------------------------------------------------------------------

def gemm_tolerance(a: np.ndarray, b: np.ndarray, precision: Precision,
                   row_block: int = 64) -> np.ndarray:
    """Per-element bound 4*eps*K*max_k |a_ik|*|b_kj| for C = a@b.

    Evaluated exactly, in row blocks to bound the (rows, n, k) intermediate.
    """
    eps = precision.eps
    k = a.shape[1]
    absa = np.abs(a).astype(np.float64)
    absb = np.abs(b).astype(np.float64)
    m, n = absa.shape[0], absb.shape[1]
    bound = np.empty((m, n))
    for r0 in range(0, m, row_block):
        r1 = min(r0 + row_block, m)
        bound[r0:r1] = np.max(absa[r0:r1, :, None] * absb[None, :, :], axis=1)
    return 4.0 * eps * max(k, 1) * bound


def reduction_tolerance(x: np.ndarray, y: np.ndarray | None, precision: Precision) -> float:
    """Bound 4*eps*n*max|x_i*y_i| for dot-style reductions (y=x when absent)."""
    if x.size == 0:
        return 0.0
    xv = np.abs(x).astype(np.float64)
    yv = xv if y is None else np.abs(y).astype(np.float64)
    return 4.0 * precision.eps * x.size * float(np.max(xv * yv))


def allclose_tol(actual: np.ndarray, expected: np.ndarray, tol, scale: float = 1.0) -> bool:
    """Elementwise |actual - expected| <= scale*tol (+ tiny absolute floor)."""
    diff = np.abs(np.asarray(actual, dtype=np.complex128) - np.asarray(expected, dtype=np.complex128))
    limit = scale * np.asarray(tol, dtype=np.float64) + 1e-300
    return bool(np.all(diff <= limit))
