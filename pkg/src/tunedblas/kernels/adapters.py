"""Access adapters: map logical matrix elements onto structured storage.

The matrix-vector and rank-update kernels read their operand through an
adapter that materializes row panels of op(A) on demand, so one kernel serves
the general, banded, packed, symmetric, hermitian and triangular routine
variants.  Reads outside the stored region yield the structurally implied
value: zero off the band or triangle, the mirrored (conjugated) element for
symmetric (hermitian) storage, one on a unit diagonal.
"""

from __future__ import annotations

import numpy as np

from ..core import Diagonal, Transpose, Triangle
from ..errors import UsageError

__all__ = [
    "AccessAdapter",
    "GeneralAdapter",
    "BandAdapter",
    "SymmetricAdapter",
    "SymmetricBandAdapter",
    "SymmetricPackedAdapter",
    "TriangularAdapter",
    "TriangularBandAdapter",
    "TriangularPackedAdapter",
]


class AccessAdapter:
    """Materializes row panels of the logical op(A) in a compute dtype."""

    #: (rows, cols) of op(A)
    shape: tuple

    def __init__(self, shape, dtype, trans: Transpose = Transpose.NO):
        self.logical_shape = shape  # shape of A itself
        self.dtype = np.dtype(dtype)
        self.trans = trans
        #: extra conjugation on top of the transpose tag (layout folding)
        self.conj = False
        if trans is Transpose.NO:
            self.shape = shape
        else:
            self.shape = (shape[1], shape[0])

    def rows(self, r0: int, r1: int) -> np.ndarray:
        """Rows [r0, r1) of op(A), materialized as a (r1-r0, cols) array."""
        if self.trans is Transpose.NO:
            panel = self._block(r0, r1, 0, self.logical_shape[1])
        else:
            panel = self._block(0, self.logical_shape[0], r0, r1).T
            if self.trans is Transpose.CONJUGATE:
                panel = np.conj(panel)
        if self.conj:
            panel = np.conj(panel)
        return panel.astype(self.dtype, copy=False)

    def materialize(self) -> np.ndarray:
        """The full op(A) as a dense array."""
        return self.rows(0, self.shape[0])

    def _block(self, r0, r1, c0, c1) -> np.ndarray:
        raise NotImplementedError


class GeneralAdapter(AccessAdapter):
    """Plain dense storage."""

    def __init__(self, a: np.ndarray, dtype, trans=Transpose.NO):
        super().__init__(a.shape, dtype, trans)
        self._a = a

    def _block(self, r0, r1, c0, c1):
        return self._a[r0:r1, c0:c1]


class BandAdapter(AccessAdapter):
    """General band storage: element (i, j) lives at band[ku + i - j, j].

    Valid for max(0, j-ku) <= i <= min(m-1, j+kl); elsewhere the logical
    value is zero.
    """

    def __init__(self, band: np.ndarray, m: int, n: int, kl: int, ku: int,
                 dtype, trans=Transpose.NO):
        if kl < 0 or ku < 0:
            raise UsageError("band widths must be >= 0")
        if band.shape[0] < kl + ku + 1:
            raise UsageError("band storage has fewer than kl+ku+1 rows")
        super().__init__((m, n), dtype, trans)
        self._band = band
        self.kl, self.ku = kl, ku

    def _block(self, r0, r1, c0, c1):
        ii = np.arange(r0, r1)[:, None]
        jj = np.arange(c0, c1)[None, :]
        row = self.ku + ii - jj
        mask = (row >= 0) & (row <= self.ku + self.kl)
        vals = self._band[np.clip(row, 0, self.ku + self.kl), jj]
        return np.where(mask, vals, 0)


class SymmetricAdapter(AccessAdapter):
    """Symmetric or hermitian dense storage; only one triangle is stored."""

    def __init__(self, a: np.ndarray, triangle: Triangle, dtype,
                 hermitian: bool = False, trans=Transpose.NO):
        n = a.shape[0]
        super().__init__((n, n), dtype, trans)
        self._a = a
        self.triangle = triangle
        self.hermitian = hermitian

    def _block(self, r0, r1, c0, c1):
        ii = np.arange(r0, r1)[:, None]
        jj = np.arange(c0, c1)[None, :]
        stored = (ii <= jj) if self.triangle is Triangle.UPPER else (ii >= jj)
        direct = self._a[r0:r1, c0:c1]
        mirror = self._a.T[r0:r1, c0:c1]
        if self.hermitian:
            mirror = np.conj(mirror)
        block = np.where(stored, direct, mirror)
        if self.hermitian and np.iscomplexobj(block):
            block = np.where(ii == jj, block.real + 0j, block)
        return block


class SymmetricBandAdapter(AccessAdapter):
    """Symmetric/hermitian band storage with k off-diagonals on one side.

    Upper storage: (i, j) with j-k <= i <= j at band[k + i - j, j]; the other
    triangle mirrors (conjugates).
    """

    def __init__(self, band: np.ndarray, n: int, k: int, triangle: Triangle,
                 dtype, hermitian: bool = False, trans=Transpose.NO):
        if k < 0:
            raise UsageError("band width must be >= 0")
        if band.shape[0] < k + 1:
            raise UsageError("band storage has fewer than k+1 rows")
        super().__init__((n, n), dtype, trans)
        self._band = band
        self.k = k
        self.triangle = triangle
        self.hermitian = hermitian

    def _entry(self, ii, jj):
        # Stored-triangle band lookup for logical (ii, jj) grids.
        if self.triangle is Triangle.UPPER:
            row = self.k + ii - jj
        else:
            row = ii - jj
        mask = (row >= 0) & (row <= self.k)
        vals = self._band[np.clip(row, 0, self.k), jj]
        return np.where(mask, vals, 0), mask

    def _block(self, r0, r1, c0, c1):
        ii = np.arange(r0, r1)[:, None]
        jj = np.arange(c0, c1)[None, :]
        upper = self.triangle is Triangle.UPPER
        in_stored = (ii <= jj) if upper else (ii >= jj)
        direct, dmask = self._entry(ii, jj)
        mirror, mmask = self._entry(jj, ii)
        if self.hermitian:
            mirror = np.conj(mirror)
        block = np.where(in_stored & dmask, direct, 0)
        block = block + np.where(~in_stored & mmask, mirror, 0)
        if self.hermitian and np.iscomplexobj(block):
            block = np.where(ii == jj, block.real + 0j, block)
        return block


def packed_index(n: int, triangle: Triangle, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
    """Offset of logical (ii, jj) inside column-major packed triangle storage.

    Upper: column j holds rows 0..j starting at j(j+1)/2.  Lower: column j
    holds rows j..n-1 starting at jn - j(j-1)/2.
    """
    if triangle is Triangle.UPPER:
        return ii + jj * (jj + 1) // 2
    return ii - jj + jj * (2 * n - jj + 1) // 2


class SymmetricPackedAdapter(AccessAdapter):
    """Symmetric/hermitian packed storage (column-major packed triangle)."""

    def __init__(self, packed: np.ndarray, n: int, triangle: Triangle, dtype,
                 hermitian: bool = False, trans=Transpose.NO):
        if packed.shape[0] < n * (n + 1) // 2:
            raise UsageError("packed storage shorter than n(n+1)/2")
        super().__init__((n, n), dtype, trans)
        self._ap = packed
        self.n = n
        self.triangle = triangle
        self.hermitian = hermitian

    def _block(self, r0, r1, c0, c1):
        ii = np.arange(r0, r1)[:, None]
        jj = np.arange(c0, c1)[None, :]
        upper = self.triangle is Triangle.UPPER
        in_stored = (ii <= jj) if upper else (ii >= jj)
        si = np.where(in_stored, ii, jj)
        sj = np.where(in_stored, jj, ii)
        block = self._ap[packed_index(self.n, self.triangle, si, sj)]
        if self.hermitian:
            block = np.where(in_stored, block, np.conj(block))
            if np.iscomplexobj(block):
                block = np.where(ii == jj, block.real + 0j, block)
        return block


class TriangularAdapter(AccessAdapter):
    """Triangular dense storage; implied zeros and optional unit diagonal."""

    def __init__(self, a: np.ndarray, triangle: Triangle, diagonal: Diagonal,
                 dtype, trans=Transpose.NO):
        n = a.shape[0]
        super().__init__((n, n), dtype, trans)
        self._a = a
        self.triangle = triangle
        self.diagonal = diagonal

    def _block(self, r0, r1, c0, c1):
        ii = np.arange(r0, r1)[:, None]
        jj = np.arange(c0, c1)[None, :]
        in_tri = (ii <= jj) if self.triangle is Triangle.UPPER else (ii >= jj)
        block = np.where(in_tri, self._a[r0:r1, c0:c1], 0)
        if self.diagonal is Diagonal.UNIT:
            block = np.where(ii == jj, 1, block)
        return block


class TriangularBandAdapter(AccessAdapter):
    """Triangular band storage with k off-diagonals."""

    def __init__(self, band: np.ndarray, n: int, k: int, triangle: Triangle,
                 diagonal: Diagonal, dtype, trans=Transpose.NO):
        if band.shape[0] < k + 1:
            raise UsageError("band storage has fewer than k+1 rows")
        super().__init__((n, n), dtype, trans)
        self._band = band
        self.k = k
        self.triangle = triangle
        self.diagonal = diagonal

    def _block(self, r0, r1, c0, c1):
        ii = np.arange(r0, r1)[:, None]
        jj = np.arange(c0, c1)[None, :]
        if self.triangle is Triangle.UPPER:
            row = self.k + ii - jj
            in_band = (row >= 0) & (row <= self.k)
        else:
            row = ii - jj
            in_band = (row >= 0) & (row <= self.k)
        block = np.where(in_band, self._band[np.clip(row, 0, self.k), jj], 0)
        if self.diagonal is Diagonal.UNIT:
            block = np.where(ii == jj, 1, block)
        return block


class TriangularPackedAdapter(AccessAdapter):
    """Triangular packed storage."""

    def __init__(self, packed: np.ndarray, n: int, triangle: Triangle,
                 diagonal: Diagonal, dtype, trans=Transpose.NO):
        if packed.shape[0] < n * (n + 1) // 2:
            raise UsageError("packed storage shorter than n(n+1)/2")
        super().__init__((n, n), dtype, trans)
        self._ap = packed
        self.n = n
        self.triangle = triangle
        self.diagonal = diagonal

    def _block(self, r0, r1, c0, c1):
        ii = np.arange(r0, r1)[:, None]
        jj = np.arange(c0, c1)[None, :]
        in_tri = (ii <= jj) if self.triangle is Triangle.UPPER else (ii >= jj)
        si = np.where(in_tri, ii, 0)
        sj = np.where(in_tri, jj, 0)
        block = np.where(in_tri, self._ap[packed_index(self.n, self.triangle, si, sj)], 0)
        if self.diagonal is Diagonal.UNIT:
            block = np.where(ii == jj, 1, block)
        return block
