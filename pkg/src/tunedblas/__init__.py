"""Auto-tuned dense linear algebra on a configurable virtual device.

The library exposes a device-buffer BLAS surface (levels 1-3 plus batched and
convenience extras) whose kernels are parameterized and auto-tunable per
device profile, problem size and precision, with a persistent tuning database
and cross-device defaults.
"""

from .core import (
    Buffer,
    Context,
    DeviceSpec,
    Diagonal,
    Layout,
    Precision,
    Side,
    Transpose,
    Triangle,
    buffer_alloc,
    buffer_read,
    buffer_write,
    context_create,
    half_from_f32,
    half_to_f32,
    host_device,
)
from .errors import (
    ConfigurationError,
    DbLookupError,
    ExperimentError,
    RangeError,
    SingularMatrixError,
    TunedBlasError,
    TuningError,
    UsageError,
    ValidationError,
)
from .kernels import (
    AxpyParams,
    Configuration,
    DotParams,
    GemmParams,
    GemvParams,
    GerParams,
    TransformParams,
    curated_configurations,
    enumerate_search_space,
    full_grid_size,
    launch_grid,
    local_mem_usage,
    validate_gemm_params,
)
from .routines import *  # noqa: F401,F403  (the routine surface)
from .routines import __all__ as _routine_names
from .tuner import Measurement, TuningRun, TuningTask, best_config, measure, tune
from .tuningdb import (
    Database,
    DbKey,
    ParameterStore,
    compute_defaults,
    db_insert,
    db_lookup,
    override_parameters,
)
from .bench import (
    BenchRow,
    HeatmapResult,
    heatmap_experiment,
    metrics,
    run_client,
    sweep_sizes,
)

__version__ = "0.1.0"

__all__ = [
    "Buffer", "Context", "DeviceSpec", "Diagonal", "Layout", "Precision",
    "Side", "Transpose", "Triangle",
    "buffer_alloc", "buffer_read", "buffer_write", "context_create",
    "half_from_f32", "half_to_f32", "host_device",
    "ConfigurationError", "DbLookupError", "ExperimentError", "RangeError",
    "SingularMatrixError", "TunedBlasError", "TuningError", "UsageError",
    "ValidationError",
    "AxpyParams", "Configuration", "DotParams", "GemmParams", "GemvParams",
    "GerParams", "TransformParams",
    "curated_configurations", "enumerate_search_space", "full_grid_size",
    "launch_grid", "local_mem_usage", "validate_gemm_params",
    "Measurement", "TuningRun", "TuningTask", "best_config", "measure", "tune",
    "Database", "DbKey", "ParameterStore", "compute_defaults", "db_insert",
    "db_lookup", "override_parameters",
    "BenchRow", "HeatmapResult", "heatmap_experiment", "metrics",
    "run_client", "sweep_sizes",
] + list(_routine_names)
