import sys
from pathlib import Path

import numpy as np
import pytest

import tunedblas as tb

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def ctx():
    return tb.context_create(tb.host_device())


@pytest.fixture
def parallel_ctx():
    return tb.context_create(tb.host_device(parallel=True))


def make_buffer(ctx, arr, precision):
    """Column-major buffer holding ``arr`` (any dimensionality)."""
    arr = np.asarray(arr, dtype=precision.dtype)
    buf = tb.buffer_alloc(ctx, precision, arr.size)
    order = "F" if arr.ndim == 2 else "C"
    buf.data[:] = arr.reshape(-1, order=order)
    return buf


def read_matrix(buf, m, n):
    """Column-major (m, n) matrix from a buffer's first m*n elements."""
    return buf.data[: m * n].reshape((n, m)).T.copy()


def rand_array(rng, shape, precision, scale=1.0):
    data = rng.uniform(-scale, scale, size=shape)
    if precision.is_complex:
        data = data + 1j * rng.uniform(-scale, scale, size=shape)
    return data.astype(precision.dtype)
