"""Work-group grids and the virtual-device execution engine.

A kernel launch is a list of work-group closures plus a grid descriptor.  The
engine asserts the grid against the device's resource limits, then runs the
closures either in submission order (sequential backend) or on the context's
worker pool (parallel backend).  Work-groups never share output elements, so
both backends produce bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..core import Context, DeviceSpec, LaunchRecord, Precision
from ..errors import UsageError
from .params import Configuration, local_mem_usage, require_valid

__all__ = ["WorkGrid", "launch_grid", "assert_launch_resources", "launch"]


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class WorkGrid:
    """Work-group counts per dimension and threads per group."""

    work_groups: tuple
    work_group_size: int

    @property
    def total_groups(self) -> int:
        total = 1
        for g in self.work_groups:
            total *= g
        return total


def launch_grid(family: str, dims: tuple, config: Configuration) -> WorkGrid:
    """Grid implied by a configuration for a problem of the given dimensions.

    ``dims`` is (n,) for the 1-D families, (rows,) for gemv, (m, n) for ger,
    (Mp, Np) for gemm (pre-padded to exact tile multiples), and (rows, cols)
    for the transform kernels.
    """
    base = "gemm" if family == "gemm_direct" else family
    if config.family != base:
        raise UsageError(f"configuration for {config.family!r} used with family {family!r}")
    v = config.as_dict()
    if any(d < 0 for d in dims):
        raise UsageError("problem dimensions must be >= 0")

    if family in ("axpy", "dot"):
        (n,) = dims
        span = v["WGS"] * v["WPT"] * v["VW"]
        return WorkGrid((max(_ceil_div(n, span), 1),), v["WGS"])
    if family == "gemv":
        (rows,) = dims
        return WorkGrid((max(_ceil_div(rows, v["WPR"]), 1),), v["WGS"])
    if family == "ger":
        m, _n = dims
        span = v["WGS"] * v["WPT"]
        return WorkGrid((max(_ceil_div(m, span), 1),), v["WGS"])
    if family == "gemm":
        mp, np_ = dims
        if mp % v["MWG"] or np_ % v["NWG"]:
            raise UsageError(
                f"gemm grid requires exact tile multiples: ({mp}, {np_}) "
                f"vs tiles ({v['MWG']}, {v['NWG']})"
            )
        return WorkGrid((mp // v["MWG"], np_ // v["NWG"]), v["MDIMC"] * v["NDIMC"])
    if family == "gemm_direct":
        m, n = dims
        return WorkGrid(
            (max(_ceil_div(m, v["MWG"]), 1), max(_ceil_div(n, v["NWG"]), 1)),
            v["MDIMC"] * v["NDIMC"],
        )
    if family == "transform":
        rows, cols = dims
        return WorkGrid(
            (max(_ceil_div(rows, v["TDX"]), 1), max(_ceil_div(cols, v["TDY"]), 1)),
            v["TDX"] * v["TDY"],
        )
    raise UsageError(f"unknown kernel family {family!r}")


def assert_launch_resources(
    grid: WorkGrid, local_bytes: int, device: DeviceSpec
) -> None:
    """Resource assertions run at every launch, independent of the filter."""
    if grid.work_group_size > device.max_work_group_size:
        raise AssertionError(
            f"launch exceeds device limit: work-group size {grid.work_group_size} "
            f"> {device.max_work_group_size}"
        )
    if local_bytes > device.local_mem_bytes:
        raise AssertionError(
            f"launch exceeds device limit: local memory {local_bytes} B "
            f"> {device.local_mem_bytes} B"
        )
    if grid.total_groups < 1 or grid.work_group_size < 1:
        raise AssertionError("degenerate launch grid")


def launch(
    ctx: Context,
    family: str,
    config: Configuration,
    grid: WorkGrid,
    tasks,
    precision: Precision,
):
    """Execute work-group ``tasks`` on the context's backend.

    Returns the per-task results in submission order (reduction kernels use
    them; others return None).  The launch is recorded on the context for
    introspection.
    """
    base_family = "gemm" if family == "gemm_direct" else family
    require_valid(Configuration(base_family, config.values), ctx.device, precision)
    local_bytes = (
        local_mem_usage(Configuration("gemm", config.values), precision)
        if base_family == "gemm"
        else 0
    )
    assert_launch_resources(grid, local_bytes, ctx.device)
    ctx.last_launch = LaunchRecord(
        family=family,
        params=config.as_dict(),
        work_groups=grid.work_groups,
        work_group_size=grid.work_group_size,
    )
    pool = ctx.pool
    if pool is None:
        return [task() for task in tasks]
    return list(pool.map(_call, tasks))


def _call(task):
    return task()
