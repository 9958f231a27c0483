"""Extra routines: out-of-place matrix copy, im2col, and batched operations.

Batched routines validate every instance up front (including output-range
overlap across the batch), then execute all instances inside a single launch
with the batch index as an extra grid dimension; each instance's arithmetic
is identical to the corresponding non-batched call, so results match it
bitwise.
"""

from __future__ import annotations

import numpy as np

from ..core import Buffer, Context, Layout, Transpose, matrix_view, vector_view
from ..errors import UsageError
from ..kernels import GemmDirectArgs, GemmIndirectArgs
from ..kernels.compute import _spans, gemm_direct_tasks, gemm_indirect_tasks
from ..kernels.engine import WorkGrid, launch, launch_grid
from ..kernels.transforms import run_transform
from .common import check_precision, get_store, scalar
from .level3 import _ceil_to, _logical

__all__ = ["omatcopy", "im2col", "axpy_batched", "gemm_batched", "gemm_strided_batched"]


def omatcopy(ctx: Context, layout: Layout, trans: Transpose, m: int, n: int,
             alpha, a: Buffer, b: Buffer, *, a_offset: int = 0,
             lda: int | None = None, b_offset: int = 0,
             ldb: int | None = None) -> None:
    """B = alpha * op(A), out of place; A is m x n, B has op(A)'s shape."""
    precision = a.precision
    check_precision(ctx, precision, a, b)
    if m < 0 or n < 0:
        raise UsageError("dimensions must be >= 0")
    if m == 0 or n == 0:
        return
    out_rows, out_cols = (m, n) if trans is Transpose.NO else (n, m)
    lda = lda if lda is not None else (m if layout is Layout.COL_MAJOR else n)
    ldb = ldb if ldb is not None else (out_rows if layout is Layout.COL_MAJOR else out_cols)
    av = _logical(a, a_offset, m, n, lda, layout)
    bv = _logical(b, b_offset, out_rows, out_cols, ldb, layout)
    if a is b:
        a_span = a_offset + (lda * (av.shape[1 if layout is Layout.COL_MAJOR else 0] - 1)
                             + av.shape[0 if layout is Layout.COL_MAJOR else 1])
        b_span = b_offset + (ldb * (out_cols - 1) + out_rows)
        if not (a_span <= b_offset or b_span <= a_offset):
            raise UsageError("omatcopy source and destination must not overlap")
    store = get_store(ctx)
    cfg, _ = store.resolve("transform", precision, ctx.device, (m, n, 0))
    kind = "copy_pad" if trans is Transpose.NO else "transpose_pad"
    run_transform(kind, av, bv, ctx, cfg, precision, pad_value=0,
                  conjugate=trans is Transpose.CONJUGATE,
                  scale=scalar(alpha, precision))


def im2col(ctx: Context, channels: int, height: int, width: int,
           kernel_h: int, kernel_w: int, pad_h: int, pad_w: int,
           stride_h: int, stride_w: int, dilation_h: int, dilation_w: int,
           im: Buffer, col: Buffer, *, im_offset: int = 0, col_offset: int = 0) -> None:
    """Rearrange image patches into columns so convolution becomes a matmul.

    The image is channel-major with row-major h x w planes.  The output is the
    (channels*kernel_h*kernel_w) x (out_h*out_w) column matrix, stored
    column-major, with column q = oy*out_w + ox holding the patch at output
    position (oy, ox); a weights-as-rows GEMM against it equals direct
    cross-correlation.
    """
    precision = im.precision
    check_precision(ctx, precision, im, col)
    if channels < 1 or height < 1 or width < 1 or kernel_h < 1 or kernel_w < 1:
        raise UsageError("image and kernel dimensions must be >= 1")
    if stride_h < 1 or stride_w < 1 or dilation_h < 1 or dilation_w < 1:
        raise UsageError("strides and dilations must be >= 1")
    span_h = dilation_h * (kernel_h - 1) + 1
    span_w = dilation_w * (kernel_w - 1) + 1
    out_h = (height + 2 * pad_h - span_h) // stride_h + 1
    out_w = (width + 2 * pad_w - span_w) // stride_w + 1
    if out_h <= 0 or out_w <= 0:
        raise UsageError("convolution output dimensions are not positive")

    rows = channels * kernel_h * kernel_w
    cols = out_h * out_w
    im.check_range(im_offset, channels * height * width)
    col.check_range(col_offset, rows * cols)
    image = im.data[im_offset : im_offset + channels * height * width].reshape(
        channels, height, width)

    # Gather indices for every (channel, ky, kx) row and (oy, ox) column.
    ky = np.arange(kernel_h)
    kx = np.arange(kernel_w)
    oy = np.arange(out_h)
    ox = np.arange(out_w)
    y_idx = ky[:, None] * dilation_h + oy[None, :] * stride_h - pad_h  # (kh, oh)
    x_idx = kx[:, None] * dilation_w + ox[None, :] * stride_w - pad_w  # (kw, ow)
    y_ok = (y_idx >= 0) & (y_idx < height)
    x_ok = (x_idx >= 0) & (x_idx < width)
    yc = np.clip(y_idx, 0, height - 1)
    xc = np.clip(x_idx, 0, width - 1)

    # patch[c, ky, kx, oy, ox]
    gathered = image[:, yc[:, None, :, None], xc[None, :, None, :]]
    mask = (y_ok[:, None, :, None] & x_ok[None, :, None, :])[None, ...]
    patches = np.where(mask, gathered, 0)
    matrix = patches.reshape(rows, cols)

    out_view = matrix_view(col, col_offset, rows, cols, rows)
    store = get_store(ctx)
    cfg, _ = store.resolve("transform", precision, ctx.device, (rows, cols, 0))
    run_transform("copy_pad", matrix, out_view, ctx, cfg, precision, pad_value=0)


# ---------------------------------------------------------------------------
# Batched routines
# ---------------------------------------------------------------------------

def _check_no_overlap(spans, what: str):
    ordered = sorted(range(len(spans)), key=lambda i: spans[i][0])
    for prev, cur in zip(ordered, ordered[1:]):
        if spans[prev][1] > spans[cur][0]:
            raise UsageError(
                f"batched {what} ranges overlap between instances {prev} and {cur}"
            )


def axpy_batched(ctx: Context, n: int, alphas, x: Buffer, x_offsets, y: Buffer,
                 y_offsets, batch_count: int, *, x_inc: int = 1, y_inc: int = 1) -> None:
    """batch_count independent axpy instances in one launch."""
    precision = x.precision
    check_precision(ctx, precision, x, y)
    if batch_count < 1:
        raise UsageError("batch_count must be >= 1")
    alphas = list(alphas)
    x_offsets = [int(v) for v in x_offsets]
    y_offsets = [int(v) for v in y_offsets]
    if not (len(alphas) == len(x_offsets) == len(y_offsets) == batch_count):
        raise UsageError("alphas and offset arrays must have length batch_count")

    span = (n - 1) * abs(x_inc) + 1 if n else 0
    y_span = (n - 1) * abs(y_inc) + 1 if n else 0
    views = []
    for b in range(batch_count):
        try:
            xs = vector_view(x, x_offsets[b], n, x_inc)
            ys = vector_view(y, y_offsets[b], n, y_inc)
        except Exception as exc:
            raise UsageError(f"batched axpy instance {b}: {exc}") from exc
        views.append((scalar(alphas[b], precision), xs, ys))
    _check_no_overlap([(o, o + y_span) for o in y_offsets], "axpy output")

    store = get_store(ctx)
    cfg, _ = store.resolve("axpy", precision, ctx.device, (0, n, 0))
    # One launch: the per-instance work-group tasks are concatenated with the
    # batch index as the leading grid dimension.
    v = cfg.as_dict()
    stride = v["WGS"] * v["WPT"] * v["VW"]
    grid1 = launch_grid("axpy", (n,), cfg)
    tasks = []
    cdt = precision.compute_dtype
    rounds = precision.dtype != cdt
    for alpha, xs, ys in views:
        for lo, hi in _spans(n, stride):
            def task(alpha=alpha, xs=xs, ys=ys, lo=lo, hi=hi):
                seg_x = xs[lo:hi]
                seg_y = ys[lo:hi]
                if rounds:
                    seg_y[...] = (seg_y.astype(cdt) + alpha * seg_x.astype(cdt)).astype(
                        precision.dtype)
                else:
                    seg_y += alpha * seg_x
            tasks.append(task)
    grid = WorkGrid((batch_count,) + grid1.work_groups, grid1.work_group_size)
    launch(ctx, "axpy", cfg, grid, tasks, precision)


def _gemm_instance_views(ctx, layout, trans_a, trans_b, m, n, k, a, b, c,
                         a_off, lda, b_off, ldb, c_off, ldc, index):
    try:
        a_rows, a_cols = (m, k) if trans_a is Transpose.NO else (k, m)
        b_rows, b_cols = (k, n) if trans_b is Transpose.NO else (n, k)
        av = _logical(a, a_off, a_rows, a_cols, lda, layout)
        bv = _logical(b, b_off, b_rows, b_cols, ldb, layout)
        cv = _logical(c, c_off, m, n, ldc, layout)
    except Exception as exc:
        raise UsageError(f"batched gemm instance {index}: {exc}") from exc
    return av, bv, cv


def _gemm_batched_core(ctx, layout, trans_a, trans_b, m, n, k, alphas, a,
                       a_offsets, lda, b, b_offsets, ldb, betas, c, c_offsets,
                       ldc, batch_count):
    precision = a.precision
    check_precision(ctx, precision, a, b, c)
    if batch_count < 1:
        raise UsageError("batch_count must be >= 1")
    if m < 0 or n < 0 or k < 0:
        raise UsageError("gemm dimensions must be >= 0")
    lda = lda if lda is not None else ((m if trans_a is Transpose.NO else k)
                                       if layout is Layout.COL_MAJOR
                                       else (k if trans_a is Transpose.NO else m))
    ldb = ldb if ldb is not None else ((k if trans_b is Transpose.NO else n)
                                       if layout is Layout.COL_MAJOR
                                       else (n if trans_b is Transpose.NO else k))
    ldc = ldc if ldc is not None else (m if layout is Layout.COL_MAJOR else n)

    instances = []
    for idx in range(batch_count):
        av, bv, cv = _gemm_instance_views(
            ctx, layout, trans_a, trans_b, m, n, k, a, b, c,
            a_offsets[idx], lda, b_offsets[idx], ldb, c_offsets[idx], ldc, idx)
        instances.append((scalar(alphas[idx], precision),
                          scalar(betas[idx], precision), av, bv, cv))
    c_span = ldc * ((n if layout is Layout.COL_MAJOR else m) - 1) + \
        (m if layout is Layout.COL_MAJOR else n) if m and n else 0
    _check_no_overlap([(off, off + c_span) for off in c_offsets], "gemm output")

    if m == 0 or n == 0:
        return

    store = get_store(ctx)
    cfg, _ = store.resolve("gemm", precision, ctx.device, (m, n, k))
    kernel = "direct" if max(m, n, k) < store.direct_threshold else "indirect"
    cdt = precision.compute_dtype

    # Build the per-instance kernel argument records exactly as the plain
    # routine would, then run all their work-groups in one launch.
    all_tasks = []
    finishers = []
    grid1 = None
    v = cfg.as_dict()
    for alpha, beta, av, bv, cv in instances:
        a_op = av if trans_a is Transpose.NO else av.T
        if trans_a is Transpose.CONJUGATE:
            a_op = np.conj(a_op)
        a_arr = np.ascontiguousarray(a_op, dtype=cdt)
        if trans_b is Transpose.NO:
            b_op = bv.T
        elif trans_b is Transpose.YES:
            b_op = bv
        else:
            b_op = np.conj(bv)
        bt_arr = np.ascontiguousarray(b_op, dtype=cdt)

        if k == 0 or alpha == 0:
            def finish(beta=beta, cv=cv):
                if beta == 0:
                    cv[...] = 0
                else:
                    cv[...] = (beta * cv.astype(cdt)).astype(precision.dtype, copy=False)
            finishers.append(finish)
            continue

        if kernel == "direct":
            args = GemmDirectArgs(
                m=m, n=n, k=k, alpha=alpha, beta=beta,
                a_get=lambda r0, r1, a_arr=a_arr: a_arr[r0:r1],
                bt_get=lambda c0, c1, bt_arr=bt_arr: bt_arr[c0:c1],
                c=cv,
            )
            tasks, grid1 = gemm_direct_tasks(cfg, args, precision)
            all_tasks.extend(tasks)
        else:
            mp = _ceil_to(max(m, 1), v["MWG"])
            np_ = _ceil_to(max(n, 1), v["NWG"])
            kp = _ceil_to(max(k, 1), v["KWG"])
            aw = np.zeros((mp, kp), dtype=cdt)
            aw[:m, :k] = a_arr
            btw = np.zeros((np_, kp), dtype=cdt)
            btw[:n, :k] = bt_arr
            cw = np.zeros((mp, np_), dtype=cdt)
            if beta != 0:
                cw[:m, :n] = cv.astype(cdt, copy=False)
            args = GemmIndirectArgs(mp=mp, np_=np_, kp=kp, alpha=alpha,
                                    beta=beta, a=aw, bt=btw, c=cw)
            tasks, grid1 = gemm_indirect_tasks(cfg, args)
            all_tasks.extend(tasks)

            def finish(cw=cw, cv=cv):
                cv[...] = cw[:m, :n].astype(precision.dtype, copy=False)
            finishers.append(finish)

    if all_tasks:
        grid = WorkGrid((batch_count,) + grid1.work_groups, grid1.work_group_size)
        family = "gemm_direct" if kernel == "direct" else "gemm"
        launch(ctx, family, cfg, grid, all_tasks, precision)
    for finish in finishers:
        finish()


def gemm_batched(ctx: Context, layout: Layout, trans_a: Transpose,
                 trans_b: Transpose, m: int, n: int, k: int, alphas,
                 a: Buffer, a_offsets, b: Buffer, b_offsets, betas,
                 c: Buffer, c_offsets, batch_count: int, *,
                 lda: int | None = None, ldb: int | None = None,
                 ldc: int | None = None) -> None:
    """batch_count gemm instances with per-instance offsets and scalars."""
    alphas = list(alphas)
    betas = list(betas)
    a_offsets = [int(v) for v in a_offsets]
    b_offsets = [int(v) for v in b_offsets]
    c_offsets = [int(v) for v in c_offsets]
    lengths = {len(alphas), len(betas), len(a_offsets), len(b_offsets), len(c_offsets)}
    if lengths != {batch_count}:
        raise UsageError("scalar and offset arrays must all have length batch_count")
    _gemm_batched_core(ctx, layout, trans_a, trans_b, m, n, k, alphas, a,
                       a_offsets, lda, b, b_offsets, ldb, betas, c, c_offsets,
                       ldc, batch_count)


def gemm_strided_batched(ctx: Context, layout: Layout, trans_a: Transpose,
                         trans_b: Transpose, m: int, n: int, k: int, alpha,
                         a: Buffer, stride_a: int, b: Buffer, stride_b: int,
                         beta, c: Buffer, stride_c: int, batch_count: int, *,
                         a_offset: int = 0, b_offset: int = 0, c_offset: int = 0,
                         lda: int | None = None, ldb: int | None = None,
                         ldc: int | None = None) -> None:
    """Strided batched gemm: instance i uses base offset + i*stride per matrix."""
    if batch_count < 1:
        raise UsageError("batch_count must be >= 1")
    lda_eff = lda if lda is not None else ((m if trans_a is Transpose.NO else k)
                                           if layout is Layout.COL_MAJOR
                                           else (k if trans_a is Transpose.NO else m))
    ldb_eff = ldb if ldb is not None else ((k if trans_b is Transpose.NO else n)
                                           if layout is Layout.COL_MAJOR
                                           else (n if trans_b is Transpose.NO else k))
    ldc_eff = ldc if ldc is not None else (m if layout is Layout.COL_MAJOR else n)
    for name, stride, ld, rows, cols in (
        ("a", stride_a, lda_eff,
         *( (m, k) if trans_a is Transpose.NO else (k, m) )),
        ("b", stride_b, ldb_eff,
         *( (k, n) if trans_b is Transpose.NO else (n, k) )),
        ("c", stride_c, ldc_eff, m, n),
    ):
        if layout is Layout.ROW_MAJOR:
            rows, cols = cols, rows
        extent = ld * (cols - 1) + rows if rows and cols else 0
        if batch_count > 1 and stride < extent:
            raise UsageError(
                f"stride_{name} = {stride} smaller than one instance extent {extent}"
            )
    _gemm_batched_core(
        ctx, layout, trans_a, trans_b, m, n, k,
        [alpha] * batch_count,
        a, [a_offset + i * stride_a for i in range(batch_count)], lda,
        b, [b_offset + i * stride_b for i in range(batch_count)], ldb,
        [beta] * batch_count,
        c, [c_offset + i * stride_c for i in range(batch_count)], ldc,
        batch_count,
    )
