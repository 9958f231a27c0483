"""Pre/post-processing transform kernels: copy, pad, transpose, materialize.

These support kernels move matrices between user storage and the padded
workspaces the tiled matmul expects, and materialize symmetric / hermitian /
triangular storage into plain general matrices so the same matmul kernel can
serve the structured level-3 routines.
"""

from __future__ import annotations

import numpy as np

from ..core import Context, Precision, Triangle, Diagonal
from ..errors import UsageError
from .engine import launch, launch_grid
from .params import Configuration

__all__ = ["run_transform"]


def run_transform(
    kind: str,
    src: np.ndarray,
    dst: np.ndarray,
    ctx: Context,
    config: Configuration,
    precision: Precision,
    pad_value=0,
    conjugate: bool = False,
    scale=1,
    triangle: Triangle = Triangle.UPPER,
    diagonal: Diagonal = Diagonal.NON_UNIT,
) -> None:
    """Run one transform kernel tile grid over ``dst``.

    kinds: ``copy_pad`` (src into top-left, pad elsewhere), ``transpose_pad``
    (ditto with transposition and optional conjugation), ``copy_unpad``
    (extract top-left), ``symmetrize`` / ``hermitize`` / ``triangularize``
    (materialize structured square storage as a full general matrix).
    """
    v = config.as_dict()
    tdx, tdy = v["TDX"], v["TDY"]
    rows, cols = dst.shape
    grid = launch_grid("transform", (max(rows, 1), max(cols, 1)), config)

    if kind == "copy_pad":
        sr, sc = src.shape
        if sr > rows or sc > cols:
            raise UsageError("destination smaller than source")
        task_fn = _copy_pad_task(src, dst, sr, sc, pad_value, scale, conjugate)
    elif kind == "transpose_pad":
        sr, sc = src.shape
        if sc > rows or sr > cols:
            raise UsageError("destination smaller than transposed source")
        task_fn = _transpose_pad_task(src, dst, sr, sc, pad_value, scale, conjugate)
    elif kind == "copy_unpad":
        sr, sc = src.shape
        if rows > sr or cols > sc:
            raise UsageError("source smaller than destination")
        task_fn = _unpad_task(src, dst)
    elif kind in ("symmetrize", "hermitize", "triangularize"):
        sr, sc = src.shape
        if sr != sc:
            raise UsageError(f"{kind} requires a square source")
        if sr > rows or sc > cols:
            raise UsageError("destination smaller than source")
        task_fn = _materialize_task(kind, src, dst, sr, triangle, diagonal)
    else:
        raise UsageError(f"unknown transform kind {kind!r}")

    tasks = [
        task_fn(r0, min(r0 + tdx, rows), c0, min(c0 + tdy, cols))
        for r0 in range(0, rows, tdx)
        for c0 in range(0, cols, tdy)
    ]
    launch(ctx, "transform", config, grid, tasks, precision)


def _copy_pad_task(src, dst, sr, sc, pad, scale, conj):
    def make(r0, r1, c0, c1):
        def task():
            tile = np.full((r1 - r0, c1 - c0), pad, dtype=dst.dtype)
            ri, ci = min(r1, sr), min(c1, sc)
            if ri > r0 and ci > c0:
                part = src[r0:ri, c0:ci]
                if conj:
                    part = np.conj(part)
                tile[: ri - r0, : ci - c0] = scale * part if scale != 1 else part
            dst[r0:r1, c0:c1] = tile
        return task
    return make


def _transpose_pad_task(src, dst, sr, sc, pad, scale, conj):
    # dst[i, j] = op(src)[i, j] = src[j, i]; dst tile (r0:r1, c0:c1) reads
    # src (c0:c1, r0:r1).
    def make(r0, r1, c0, c1):
        def task():
            tile = np.full((r1 - r0, c1 - c0), pad, dtype=dst.dtype)
            ri, ci = min(r1, sc), min(c1, sr)
            if ri > r0 and ci > c0:
                part = src[c0:ci, r0:ri].T
                if conj:
                    part = np.conj(part)
                tile[: ri - r0, : ci - c0] = scale * part if scale != 1 else part
            dst[r0:r1, c0:c1] = tile
        return task
    return make


def _unpad_task(src, dst):
    def make(r0, r1, c0, c1):
        def task():
            dst[r0:r1, c0:c1] = src[r0:r1, c0:c1]
        return task
    return make


def _materialize_task(kind, src, dst, n, triangle, diagonal):
    upper = triangle is Triangle.UPPER
    unit = diagonal is Diagonal.UNIT

    def make(r0, r1, c0, c1):
        # Region of dst beyond the n x n source keeps its existing padding.
        ri, ci = min(r1, n), min(c1, n)

        def task():
            if ri <= r0 or ci <= c0:
                return
            ii = np.arange(r0, ri)[:, None]
            jj = np.arange(c0, ci)[None, :]
            in_tri = (ii <= jj) if upper else (ii >= jj)
            stored = src[r0:ri, c0:ci]
            if kind == "triangularize":
                tile = np.where(in_tri, stored, 0).astype(dst.dtype)
                if unit:
                    tile = np.where(ii == jj, 1, tile)
            else:
                mirror = src.T[r0:ri, c0:ci]
                if kind == "hermitize":
                    mirror = np.conj(mirror)
                tile = np.where(in_tri, stored, mirror).astype(dst.dtype)
                if kind == "hermitize" and np.iscomplexobj(tile):
                    tile = np.where(ii == jj, tile.real + 0j, tile)
            dst[r0:ri, c0:ci] = tile
        return task
    return make
