"""Parameterized kernel families, the constraint filter, and the execution engine."""

from .adapters import (
    AccessAdapter,
    BandAdapter,
    GeneralAdapter,
    SymmetricAdapter,
    SymmetricBandAdapter,
    SymmetricPackedAdapter,
    TriangularAdapter,
    TriangularBandAdapter,
    TriangularPackedAdapter,
)
from .compute import (
    GemmDirectArgs,
    GemmIndirectArgs,
    GemvArgs,
    GerArgs,
    ReduceArgs,
    VectorArgs,
    run_kernel,
)
from .engine import WorkGrid, assert_launch_resources, launch_grid
from .params import (
    AxpyParams,
    Configuration,
    DotParams,
    FAMILIES,
    GemmParams,
    GemvParams,
    GerParams,
    PARAM_NAMES,
    TransformParams,
    curated_configurations,
    default_config,
    enumerate_search_space,
    full_grid,
    full_grid_size,
    local_mem_usage,
    validate_config,
    validate_gemm_params,
    work_group_threads,
)
from .transforms import run_transform

__all__ = [
    "AccessAdapter",
    "AxpyParams",
    "BandAdapter",
    "Configuration",
    "DotParams",
    "FAMILIES",
    "GemmDirectArgs",
    "GemmIndirectArgs",
    "GemmParams",
    "GemvArgs",
    "GemvParams",
    "GerArgs",
    "GerParams",
    "GeneralAdapter",
    "PARAM_NAMES",
    "ReduceArgs",
    "SymmetricAdapter",
    "SymmetricBandAdapter",
    "SymmetricPackedAdapter",
    "TransformParams",
    "TriangularAdapter",
    "TriangularBandAdapter",
    "TriangularPackedAdapter",
    "VectorArgs",
    "WorkGrid",
    "assert_launch_resources",
    "curated_configurations",
    "default_config",
    "enumerate_search_space",
    "full_grid",
    "full_grid_size",
    "launch_grid",
    "local_mem_usage",
    "run_kernel",
    "run_transform",
    "validate_config",
    "validate_gemm_params",
    "work_group_threads",
]
