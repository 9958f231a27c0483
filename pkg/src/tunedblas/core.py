"""Foundational types: precisions, FP16 conversion, the virtual device, contexts and buffers.

Device memory is modelled as host-side numpy storage owned by a Context.  All
higher layers address it through :class:`Buffer` handles (element offsets, no
raw pointers), which mirrors a device-pointer style API while staying
executable on any host.
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, RangeError, UsageError

__all__ = [
    "Precision",
    "Layout",
    "Transpose",
    "Triangle",
    "Diagonal",
    "Side",
    "DeviceSpec",
    "Context",
    "Buffer",
    "host_device",
    "context_create",
    "buffer_alloc",
    "buffer_write",
    "buffer_read",
    "half_from_f32",
    "half_to_f32",
    "matrix_view",
    "vector_view",
]


class Precision(Enum):
    """Supported element precisions (half, single, double, complex variants)."""

    H = "H"
    S = "S"
    D = "D"
    C = "C"
    Z = "Z"

    @property
    def dtype(self) -> np.dtype:
        return _DTYPES[self]

    @property
    def compute_dtype(self) -> np.dtype:
        """Dtype used for arithmetic inside kernels (H computes in FP32)."""
        return _COMPUTE_DTYPES[self]

    @property
    def elemsize(self) -> int:
        return _ELEMSIZES[self]

    @property
    def eps(self) -> float:
        """Unit roundoff of the storage format (2^-10 / 2^-23 / 2^-52)."""
        return _EPS[self]

    @property
    def is_complex(self) -> bool:
        return self in (Precision.C, Precision.Z)


_DTYPES = {
    Precision.H: np.dtype(np.float16),
    Precision.S: np.dtype(np.float32),
    Precision.D: np.dtype(np.float64),
    Precision.C: np.dtype(np.complex64),
    Precision.Z: np.dtype(np.complex128),
}
_COMPUTE_DTYPES = {
    Precision.H: np.dtype(np.float32),
    Precision.S: np.dtype(np.float32),
    Precision.D: np.dtype(np.float64),
    Precision.C: np.dtype(np.complex64),
    Precision.Z: np.dtype(np.complex128),
}
_ELEMSIZES = {
    Precision.H: 2,
    Precision.S: 4,
    Precision.D: 8,
    Precision.C: 8,
    Precision.Z: 16,
}
_EPS = {
    Precision.H: 2.0 ** -10,
    Precision.S: 2.0 ** -23,
    Precision.D: 2.0 ** -52,
    Precision.C: 2.0 ** -23,
    Precision.Z: 2.0 ** -52,
}


class Layout(Enum):
    ROW_MAJOR = "row"
    COL_MAJOR = "col"


class Transpose(Enum):
    NO = "n"
    YES = "t"
    CONJUGATE = "c"


class Triangle(Enum):
    UPPER = "upper"
    LOWER = "lower"


class Diagonal(Enum):
    NON_UNIT = "nonunit"
    UNIT = "unit"


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


# ---------------------------------------------------------------------------
# FP16 conversion
# ---------------------------------------------------------------------------

def half_from_f32(x: float) -> int:
    """Convert an FP32 value to its IEEE binary16 encoding.

    Rounds to nearest-even; values beyond the largest finite half map to
    signed infinity and tiny values underflow to subnormals or signed zero.
    """
    with np.errstate(over="ignore"):
        return int(np.float32(x).astype(np.float16).view(np.uint16))


def half_to_f32(h: int) -> float:
    """Decode an IEEE binary16 bit pattern to FP32."""
    if not 0 <= h <= 0xFFFF:
        raise UsageError(f"half encoding out of range: {h:#x}")
    return float(np.uint16(h).view(np.float16).astype(np.float32))


# ---------------------------------------------------------------------------
# Virtual device, context, buffers
# ---------------------------------------------------------------------------

_DEVICE_TYPES = ("GPU", "CPU", "accelerator")
_BACKENDS = ("sequential", "parallel")


@dataclass(frozen=True)
class DeviceSpec:
    """A virtual device profile: resource limits plus identity.

    Resource limits feed the tuning-configuration constraint filter and the
    launch-time assertions; identity fields key the tuning database's
    defaults hierarchy.
    """

    name: str = "host-virtual"
    vendor: str = "generic"
    device_type: str = "CPU"
    architecture: str = "portable"
    max_work_group_size: int = 1024
    local_mem_bytes: int = 49152
    compute_units: int = 4
    parallel_backend: str = "sequential"

    def validate(self) -> None:
        if self.max_work_group_size < 1:
            raise ConfigurationError("max_work_group_size must be >= 1")
        if self.local_mem_bytes < 0:
            raise ConfigurationError("local_mem_bytes must be >= 0")
        if self.compute_units < 1:
            raise ConfigurationError("compute_units must be >= 1")
        if self.device_type not in _DEVICE_TYPES:
            raise ConfigurationError(f"device_type must be one of {_DEVICE_TYPES}")
        if self.parallel_backend not in _BACKENDS:
            raise ConfigurationError(f"parallel_backend must be one of {_BACKENDS}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "vendor": self.vendor,
            "device_type": self.device_type,
            "architecture": self.architecture,
            "max_work_group_size": self.max_work_group_size,
            "local_mem_bytes": self.local_mem_bytes,
            "compute_units": self.compute_units,
            "parallel_backend": self.parallel_backend,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DeviceSpec":
        known = {f for f in cls.__dataclass_fields__}
        spec = cls(**{k: v for k, v in data.items() if k in known})
        spec.validate()
        return spec


def host_device(parallel: bool = False, name: str = "host-virtual") -> DeviceSpec:
    """A device profile sized for the current host machine."""
    return DeviceSpec(
        name=name,
        compute_units=max(os.cpu_count() or 1, 1),
        parallel_backend="parallel" if parallel else "sequential",
    )


@dataclass
class LaunchRecord:
    """What the engine actually launched; used by tests and introspection."""

    family: str
    params: dict
    work_groups: tuple
    work_group_size: int


class Context:
    """Execution context bound to one virtual device.

    Owns the buffers allocated against it and the worker pool used by the
    parallel backend.  Buffers from one context are rejected by another.
    """

    def __init__(self, device: DeviceSpec):
        device.validate()
        self.device = device
        self._buffers: set[int] = set()
        self._pool: ThreadPoolExecutor | None = None
        self._pool_lock = threading.Lock()
        self.last_launch: LaunchRecord | None = None

    @property
    def pool(self) -> ThreadPoolExecutor | None:
        """Worker pool for the parallel backend (None when sequential)."""
        if self.device.parallel_backend != "parallel":
            return None
        with self._pool_lock:
            if self._pool is None:
                self._pool = ThreadPoolExecutor(
                    max_workers=self.device.compute_units,
                    thread_name_prefix="tunedblas-wg",
                )
        return self._pool

    def owns(self, buf: "Buffer") -> bool:
        return buf.context is self

    def check_owns(self, *bufs: "Buffer") -> None:
        for buf in bufs:
            if not self.owns(buf):
                raise UsageError("buffer belongs to a different context")

    def __repr__(self):
        return f"Context(device={self.device.name!r}, buffers={len(self._buffers)})"


class Buffer:
    """Device memory: ``length`` elements of one precision, addressed by offset."""

    def __init__(self, context: Context, precision: Precision, length: int):
        if length < 0:
            raise UsageError("buffer length must be >= 0")
        self.context = context
        self.precision = precision
        self.length = length
        self._data = np.zeros(length, dtype=precision.dtype)
        context._buffers.add(id(self))

    @property
    def nbytes(self) -> int:
        return self.length * self.precision.elemsize

    @property
    def data(self) -> np.ndarray:
        """The raw backing store (1-D, library internal)."""
        return self._data

    def check_range(self, offset: int, count: int) -> None:
        if offset < 0 or count < 0 or offset + count > self.length:
            raise RangeError(
                f"access [{offset}, {offset + count}) outside buffer of length {self.length}"
            )

    def __repr__(self):
        return f"Buffer({self.precision.value}, length={self.length})"


def context_create(device: DeviceSpec) -> Context:
    """Create an empty context bound to ``device`` (validates the profile)."""
    return Context(device)


def buffer_alloc(ctx: Context, precision: Precision, length: int) -> Buffer:
    """Allocate a zero-initialized buffer of ``length`` elements."""
    return Buffer(ctx, precision, length)


def buffer_write(buf: Buffer, offset: int, host_data) -> None:
    """Copy host elements into ``buf`` starting at ``offset``."""
    data = np.asarray(host_data, dtype=buf.precision.dtype).ravel()
    buf.check_range(offset, data.size)
    buf._data[offset : offset + data.size] = data


def buffer_read(buf: Buffer, offset: int, length: int) -> np.ndarray:
    """Return a copy of ``length`` elements starting at ``offset``."""
    buf.check_range(offset, length)
    return buf._data[offset : offset + length].copy()


# ---------------------------------------------------------------------------
# Strided views over buffer storage (column-major matrix / incremented vector)
# ---------------------------------------------------------------------------

def vector_view(buf: Buffer, offset: int, n: int, inc: int) -> np.ndarray:
    """A length-``n`` strided view over ``buf``; supports negative increments.

    Netlib convention: for ``inc < 0`` element i lives at
    ``offset + (n-1-i)*|inc|``, i.e. the vector is walked backwards.
    """
    if inc == 0:
        raise UsageError("vector increment must be non-zero")
    if n == 0:
        return buf._data[0:0]
    span = (n - 1) * abs(inc) + 1
    buf.check_range(offset, span)
    base = buf._data[offset : offset + span]
    if inc > 0:
        return base[::inc]
    return base[::-1][:: -inc]


def matrix_view(buf: Buffer, offset: int, rows: int, cols: int, ld: int) -> np.ndarray:
    """A (rows, cols) column-major view over ``buf`` with leading dimension ``ld``."""
    if rows < 0 or cols < 0:
        raise UsageError("matrix dimensions must be >= 0")
    if rows == 0 or cols == 0:
        return np.empty((rows, cols), dtype=buf.precision.dtype)
    if ld < rows:
        raise UsageError(f"leading dimension {ld} < row count {rows}")
    span = ld * (cols - 1) + rows
    buf.check_range(offset, span)
    # (cols, ld) C-order rows are the stored columns; transposing yields the
    # (ld, cols) Fortran-order matrix without copying.
    padded = np.lib.stride_tricks.as_strided(
        buf._data[offset:],
        shape=(cols, ld),
        strides=(ld * buf._data.itemsize, buf._data.itemsize),
    )
    return padded.T[:rows, :]
