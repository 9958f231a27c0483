"""Netlib-style convenience layer: call routines on host numpy arrays.

``netlib_call("sgemm", ...)`` allocates temporary device buffers, transfers
the host arrays in, invokes the device-style routine, and transfers results
back into the caller's arrays.  Routine ids are the Netlib names: a precision
prefix (h/s/d/c/z) followed by the routine name, e.g. ``daxpy``, ``cgemv``.
Not recommended when transfer cost matters; the buffer API avoids the copies.
"""

from __future__ import annotations

import inspect
import threading

import numpy as np

from ..core import Context, Layout, Precision, buffer_alloc, context_create, host_device
from ..errors import UsageError
from . import extras, level1, level2, level3

__all__ = ["netlib_call", "default_context"]

_PRECISIONS = {
    "h": Precision.H,
    "s": Precision.S,
    "d": Precision.D,
    "c": Precision.C,
    "z": Precision.Z,
}

# base routine -> (function, {buffer parameter: role})
_ROUTINES = {
    "axpy": (level1.axpy, {"x": "in", "y": "inout"}),
    "scal": (level1.scal, {"x": "inout"}),
    "copy": (level1.copy, {"x": "in", "y": "out"}),
    "swap": (level1.swap, {"x": "inout", "y": "inout"}),
    "dot": (level1.dot, {"x": "in", "y": "in"}),
    "dotu": (level1.dotu, {"x": "in", "y": "in"}),
    "dotc": (level1.dotc, {"x": "in", "y": "in"}),
    "nrm2": (level1.nrm2, {"x": "in"}),
    "asum": (level1.asum, {"x": "in"}),
    "sum": (level1.sum, {"x": "in"}),
    "amax": (level1.amax, {"x": "in"}),
    "amin": (level1.amin, {"x": "in"}),
    "max": (level1.max, {"x": "in"}),
    "min": (level1.min, {"x": "in"}),
    "gemv": (level2.gemv, {"a": "in", "x": "in", "y": "inout"}),
    "gbmv": (level2.gbmv, {"a": "in", "x": "in", "y": "inout"}),
    "symv": (level2.symv, {"a": "in", "x": "in", "y": "inout"}),
    "hemv": (level2.hemv, {"a": "in", "x": "in", "y": "inout"}),
    "sbmv": (level2.sbmv, {"a": "in", "x": "in", "y": "inout"}),
    "hbmv": (level2.hbmv, {"a": "in", "x": "in", "y": "inout"}),
    "spmv": (level2.spmv, {"ap": "in", "x": "in", "y": "inout"}),
    "hpmv": (level2.hpmv, {"ap": "in", "x": "in", "y": "inout"}),
    "trmv": (level2.trmv, {"a": "in", "x": "inout"}),
    "tbmv": (level2.tbmv, {"a": "in", "x": "inout"}),
    "tpmv": (level2.tpmv, {"ap": "in", "x": "inout"}),
    "trsv": (level2.trsv, {"a": "in", "x": "inout"}),
    "ger": (level2.ger, {"x": "in", "y": "in", "a": "inout"}),
    "geru": (level2.geru, {"x": "in", "y": "in", "a": "inout"}),
    "gerc": (level2.gerc, {"x": "in", "y": "in", "a": "inout"}),
    "her": (level2.her, {"x": "in", "a": "inout"}),
    "hpr": (level2.hpr, {"x": "in", "ap": "inout"}),
    "her2": (level2.her2, {"x": "in", "y": "in", "a": "inout"}),
    "hpr2": (level2.hpr2, {"x": "in", "y": "in", "ap": "inout"}),
    "syr": (level2.syr, {"x": "in", "a": "inout"}),
    "spr": (level2.spr, {"x": "in", "ap": "inout"}),
    "syr2": (level2.syr2, {"x": "in", "y": "in", "a": "inout"}),
    "spr2": (level2.spr2, {"x": "in", "y": "in", "ap": "inout"}),
    "gemm": (level3.gemm, {"a": "in", "b": "in", "c": "inout"}),
    "symm": (level3.symm, {"a": "in", "b": "in", "c": "inout"}),
    "hemm": (level3.hemm, {"a": "in", "b": "in", "c": "inout"}),
    "syrk": (level3.syrk, {"a": "in", "c": "inout"}),
    "herk": (level3.herk, {"a": "in", "c": "inout"}),
    "syr2k": (level3.syr2k, {"a": "in", "b": "in", "c": "inout"}),
    "her2k": (level3.her2k, {"a": "in", "b": "in", "c": "inout"}),
    "trmm": (level3.trmm, {"a": "in", "b": "inout"}),
    "trsm": (level3.trsm, {"a": "in", "b": "inout"}),
    "omatcopy": (extras.omatcopy, {"a": "in", "b": "out"}),
    "im2col": (extras.im2col, {"im": "in", "col": "out"}),
}

_session_lock = threading.Lock()
_session_ctx: Context | None = None


def default_context() -> Context:
    """The lazily created context used by netlib_call when none is passed."""
    global _session_ctx
    with _session_lock:
        if _session_ctx is None:
            _session_ctx = context_create(host_device())
        return _session_ctx


def _storage(arr: np.ndarray, layout) -> np.ndarray:
    """Flatten a host array to its BLAS storage order."""
    if arr.ndim == 1:
        return arr
    if arr.ndim == 2:
        order = "F" if layout is Layout.COL_MAJOR else "C"
        return arr.reshape(-1, order=order)
    raise UsageError("host arrays must be 1-D or 2-D")


def netlib_call(routine_id: str, *args, ctx: Context | None = None, **kwargs):
    """Invoke a routine by Netlib name on host numpy arrays.

    Arguments mirror the device-style routine minus the context, with numpy
    arrays in the buffer positions; in/out arrays are updated in place.
    Returns whatever the device routine returns (reduction value or None).
    """
    rid = routine_id.lower()
    if len(rid) < 2 or rid[0] not in _PRECISIONS:
        raise UsageError(f"unknown routine id {routine_id!r}")
    precision = _PRECISIONS[rid[0]]
    base = rid[1:]
    if base not in _ROUTINES:
        raise UsageError(f"unknown routine id {routine_id!r}")
    fn, roles = _ROUTINES[base]

    ctx = ctx or default_context()
    sig = inspect.signature(fn)
    bound = sig.bind(ctx, *args, **kwargs)
    bound.apply_defaults()

    layout = bound.arguments.get("layout", Layout.COL_MAJOR)
    writebacks = []
    for name, role in roles.items():
        arr = bound.arguments.get(name)
        if arr is None:
            continue
        arr = np.asanyarray(arr)
        if arr.dtype != precision.dtype:
            raise UsageError(
                f"array {name!r} has dtype {arr.dtype}, routine {routine_id!r} "
                f"expects {precision.dtype}"
            )
        flat = _storage(arr, layout)
        buf = buffer_alloc(ctx, precision, flat.size)
        if role in ("in", "inout"):
            buf.data[:] = flat
        bound.arguments[name] = buf
        if role in ("inout", "out"):
            writebacks.append((arr, buf, layout))

    result = fn(*bound.args, **bound.kwargs)

    for arr, buf, layout in writebacks:
        if arr.ndim == 1:
            arr[:] = buf.data
        else:
            order = "F" if layout is Layout.COL_MAJOR else "C"
            arr[:] = buf.data.reshape(arr.shape, order=order)
    return result
