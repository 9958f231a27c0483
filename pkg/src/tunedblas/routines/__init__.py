"""The user-facing routine surface: levels 1-3, extras, batched, Netlib layer."""

from .extras import axpy_batched, gemm_batched, gemm_strided_batched, im2col, omatcopy
from .level1 import (
    amax, amin, asum, axpy, copy, dot, dotc, dotu, max, min, nrm2, scal, sum, swap,
)
from .level2 import (
    gbmv, gemv, ger, gerc, geru, hbmv, hemv, her, her2, hpmv, hpr, hpr2,
    sbmv, spmv, spr, spr2, symv, syr, syr2, tbmv, tpmv, trmv, trsv,
)
from .level3 import gemm, hemm, her2k, herk, symm, syr2k, syrk, trmm, trsm
from .netlib import default_context, netlib_call

__all__ = [
    "amax", "amin", "asum", "axpy", "copy", "dot", "dotc", "dotu", "max", "min",
    "nrm2", "scal", "sum", "swap",
    "gbmv", "gemv", "ger", "gerc", "geru", "hbmv", "hemv", "her", "her2",
    "hpmv", "hpr", "hpr2", "sbmv", "spmv", "spr", "spr2", "symv", "syr",
    "syr2", "tbmv", "tpmv", "trmv", "trsv",
    "gemm", "hemm", "her2k", "herk", "symm", "syr2k", "syrk", "trmm", "trsm",
    "axpy_batched", "gemm_batched", "gemm_strided_batched", "im2col", "omatcopy",
    "default_context", "netlib_call",
]
