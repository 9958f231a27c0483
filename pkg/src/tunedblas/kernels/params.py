"""Tuning-parameter families, their value grids, and the constraint filter.

Each kernel family exposes a fixed set of named integer parameters.  The full
grid is the cross product of the per-parameter value lists; the curated set is
a small hand-picked cross product of the combinations most worth trying.  Both
are filtered for validity against a device before anything is measured.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, fields

from ..core import DeviceSpec, Precision
from ..errors import UsageError, ValidationError

__all__ = [
    "Configuration",
    "AxpyParams",
    "DotParams",
    "GemvParams",
    "GerParams",
    "GemmParams",
    "TransformParams",
    "FAMILIES",
    "PARAM_NAMES",
    "full_grid",
    "full_grid_size",
    "curated_configurations",
    "enumerate_search_space",
    "validate_config",
    "validate_gemm_params",
    "local_mem_usage",
    "work_group_threads",
    "default_config",
]


@dataclass(frozen=True)
class Configuration:
    """A full assignment of values to one kernel family's parameters."""

    family: str
    values: tuple  # sorted (name, value) pairs; hashable for dedup

    @classmethod
    def make(cls, family: str, values: dict) -> "Configuration":
        expected = PARAM_NAMES[family]
        if set(values) != set(expected):
            raise UsageError(
                f"configuration for {family!r} must set exactly {sorted(expected)}, "
                f"got {sorted(values)}"
            )
        return cls(family, tuple((k, int(values[k])) for k in expected))

    def as_dict(self) -> dict:
        return dict(self.values)

    def __getitem__(self, name: str) -> int:
        return dict(self.values)[name]

    def __str__(self):
        inner = " ".join(f"{k}={v}" for k, v in self.values)
        return f"{self.family}[{inner}]"


def _config_from_dataclass(family, obj) -> Configuration:
    return Configuration.make(family, {f.name: getattr(obj, f.name) for f in fields(obj)})


@dataclass(frozen=True)
class AxpyParams:
    """Elementwise-kernel parameters: work-group size, work per thread, vector width."""

    WGS: int = 128
    WPT: int = 2
    VW: int = 2

    def to_config(self) -> Configuration:
        return _config_from_dataclass("axpy", self)


@dataclass(frozen=True)
class DotParams:
    """Reduction-kernel parameters."""

    WGS: int = 128
    WPT: int = 2
    VW: int = 2

    def to_config(self) -> Configuration:
        return _config_from_dataclass("dot", self)


@dataclass(frozen=True)
class GemvParams:
    """Matrix-vector kernel parameters; WPR is the row count per work-group."""

    WGS: int = 64
    WPT: int = 1
    VW: int = 1
    WPR: int = 64

    def to_config(self) -> Configuration:
        return _config_from_dataclass("gemv", self)


@dataclass(frozen=True)
class GerParams:
    """Rank-1 update kernel parameters."""

    WGS: int = 64
    WPT: int = 2
    VW: int = 1

    def to_config(self) -> Configuration:
        return _config_from_dataclass("ger", self)


@dataclass(frozen=True)
class GemmParams:
    """The 14 tiled matrix-multiply parameters.

    MWG/NWG/KWG are the per-work-group tile sizes, MDIMC/NDIMC the thread grid,
    MDIMA/NDIMB the cooperative-load reshaping grid, KWI the k-loop unroll,
    VWM/VWN the vector widths, STRM/STRN strided-access flags, and SA/SB
    whether the A/B tiles are staged through local memory.
    """

    MWG: int = 64
    NWG: int = 64
    KWG: int = 16
    MDIMC: int = 8
    NDIMC: int = 8
    MDIMA: int = 8
    NDIMB: int = 8
    KWI: int = 2
    VWM: int = 1
    VWN: int = 1
    STRM: int = 0
    STRN: int = 0
    SA: int = 1
    SB: int = 1

    def to_config(self) -> Configuration:
        return _config_from_dataclass("gemm", self)


@dataclass(frozen=True)
class TransformParams:
    """Copy/pad/transpose kernel parameters: 2-D tile dimensions."""

    TDX: int = 16
    TDY: int = 16

    def to_config(self) -> Configuration:
        return _config_from_dataclass("transform", self)


PARAM_NAMES = {
    "axpy": ("WGS", "WPT", "VW"),
    "dot": ("WGS", "WPT", "VW"),
    "gemv": ("WGS", "WPT", "VW", "WPR"),
    "ger": ("WGS", "WPT", "VW"),
    "gemm": (
        "MWG", "NWG", "KWG", "MDIMC", "NDIMC", "MDIMA", "NDIMB",
        "KWI", "VWM", "VWN", "STRM", "STRN", "SA", "SB",
    ),
    "transform": ("TDX", "TDY"),
}

FAMILIES = tuple(PARAM_NAMES)

# Full value grids.  The gemm grid multiplies out to 1,327,104 combinations,
# far beyond what exhaustive measurement could cover.
_GRIDS = {
    "axpy": {"WGS": (32, 64, 128, 256, 512, 1024), "WPT": (1, 2, 4, 8), "VW": (1, 2, 4, 8, 16)},
    "dot": {"WGS": (32, 64, 128, 256, 512, 1024), "WPT": (1, 2, 4, 8), "VW": (1, 2, 4, 8, 16)},
    "gemv": {
        "WGS": (32, 64, 128, 256),
        "WPT": (1, 2, 4),
        "VW": (1, 2, 4),
        "WPR": (16, 32, 64, 128, 256),
    },
    "ger": {"WGS": (32, 64, 128, 256), "WPT": (1, 2, 4, 8), "VW": (1, 2, 4)},
    "gemm": {
        "MWG": (16, 32, 64, 128),
        "NWG": (16, 32, 64, 128),
        "KWG": (16, 32),
        "MDIMC": (8, 16, 32),
        "NDIMC": (8, 16, 32),
        "MDIMA": (8, 16, 32),
        "NDIMB": (8, 16, 32),
        "KWI": (2, 8),
        "VWM": (1, 2, 4, 8),
        "VWN": (1, 2, 4, 8),
        "STRM": (0, 1),
        "STRN": (0, 1),
        "SA": (0, 1),
        "SB": (0, 1),
    },
    "transform": {"TDX": (8, 16, 32, 64), "TDY": (8, 16, 32, 64)},
}


def full_grid(family: str) -> dict:
    if family not in _GRIDS:
        raise UsageError(f"unknown kernel family {family!r}")
    return _GRIDS[family]


def full_grid_size(family: str) -> int:
    """Number of combinations in the full grid, before any filtering."""
    grid = full_grid(family)
    size = 1
    for values in grid.values():
        size *= len(values)
    return size


def _curated_gemm() -> list[Configuration]:
    """The 512 baseline gemm combinations explored on every tuning run.

    Couples the tile sides, the thread and load grids, and the two vector
    widths so the list spans the axes that matter without exploding; entries
    that fail the device filter are dropped at tuning time.
    """
    out = []
    for t in (16, 32, 64, 128):
        for kwg in (16, 32):
            for dimc in (8, 16):
                for dima in (8, 16):
                    for kwi in (2, 8):
                        for vw in (1, 2, 4, 8):
                            for s in (0, 1):
                                out.append(Configuration.make("gemm", {
                                    "MWG": t, "NWG": t, "KWG": kwg,
                                    "MDIMC": dimc, "NDIMC": dimc,
                                    "MDIMA": dima, "NDIMB": dima,
                                    "KWI": kwi, "VWM": vw, "VWN": vw,
                                    "STRM": 0, "STRN": 0, "SA": s, "SB": s,
                                }))
    return out


def _curated_simple(family, combos) -> list[Configuration]:
    names = PARAM_NAMES[family]
    return [Configuration.make(family, dict(zip(names, c))) for c in combos]


def curated_configurations(family: str) -> list[Configuration]:
    """The fixed curated list for ``family`` in deterministic order."""
    if family == "gemm":
        return _curated_gemm()
    if family in ("axpy", "dot"):
        return _curated_simple(
            family,
            [(wgs, wpt, vw)
             for wgs in (64, 128, 256, 512)
             for wpt in (1, 2, 4)
             for vw in (1, 2, 4, 8)],
        )
    if family == "gemv":
        return _curated_simple(
            "gemv",
            [(wgs, wpt, vw, wpr)
             for wgs in (32, 64, 128)
             for wpt in (1, 2)
             for vw in (1, 2)
             for wpr in (32, 64, 128)],
        )
    if family == "ger":
        return _curated_simple(
            "ger",
            [(wgs, wpt, vw)
             for wgs in (32, 64, 128)
             for wpt in (1, 2, 4)
             for vw in (1, 2)],
        )
    if family == "transform":
        return _curated_simple(
            "transform",
            [(tdx, tdy) for tdx in (8, 16, 32) for tdy in (8, 16, 32)],
        )
    raise UsageError(f"unknown kernel family {family!r}")


def random_configuration(family: str, rng: random.Random) -> Configuration:
    """One uniform draw from the full grid."""
    grid = full_grid(family)
    return Configuration.make(family, {name: rng.choice(vals) for name, vals in grid.items()})


def enumerate_search_space(family: str, mode: str = "curated", n: int = 0, seed: int = 0):
    """Yield configurations: the curated list, or ``n`` seeded uniform samples.

    Raw streams; validity filtering against a device happens in the tuner
    before measurement.
    """
    if mode == "curated":
        yield from curated_configurations(family)
    elif mode == "random":
        if n < 0:
            raise UsageError("random sample count must be >= 0")
        rng = random.Random(seed)
        for _ in range(n):
            yield random_configuration(family, rng)
    else:
        raise UsageError(f"unknown enumeration mode {mode!r}")


# ---------------------------------------------------------------------------
# Validity
# ---------------------------------------------------------------------------

def work_group_threads(config: Configuration) -> int:
    """Threads per work-group implied by a configuration."""
    v = config.as_dict()
    if config.family == "gemm":
        return v["MDIMC"] * v["NDIMC"]
    if config.family == "transform":
        return v["TDX"] * v["TDY"]
    return v["WGS"]


def local_mem_usage(p: GemmParams | Configuration, precision: Precision) -> int:
    """Local-memory bytes requested by a gemm configuration.

    Only tiles staged through local memory count:
    (SA*KWG*MWG + SB*KWG*NWG) * elemsize.
    """
    v = p.as_dict() if isinstance(p, Configuration) else p.to_config().as_dict()
    elems = v["SA"] * v["KWG"] * v["MWG"] + v["SB"] * v["KWG"] * v["NWG"]
    return elems * precision.elemsize


@dataclass
class Verdict:
    """Outcome of the constraint filter: valid, or the violated constraints."""

    valid: bool
    violations: list[str]

    def __bool__(self):
        return self.valid


def validate_gemm_params(p, device: DeviceSpec, precision: Precision) -> Verdict:
    """Check one gemm configuration against device limits and kernel structure.

    Divisibility constraints protect the register tiling and the cooperative
    local-memory loads; resource constraints mirror what the executor asserts
    at launch.
    """
    v = p.as_dict() if isinstance(p, Configuration) else p.to_config().as_dict()
    bad = []

    threads = v["MDIMC"] * v["NDIMC"]
    if threads > device.max_work_group_size:
        bad.append(
            f"work-group too large: MDIMC*NDIMC = {threads} > {device.max_work_group_size}"
        )
    mem = (v["SA"] * v["KWG"] * v["MWG"] + v["SB"] * v["KWG"] * v["NWG"]) * precision.elemsize
    if mem > device.local_mem_bytes:
        bad.append(f"local memory: {mem} B > {device.local_mem_bytes} B")

    if v["KWG"] % v["KWI"] != 0:
        bad.append("KWG not divisible by KWI")
    if v["MWG"] % (v["MDIMC"] * v["VWM"]) != 0:
        bad.append("MWG not divisible by MDIMC*VWM")
    if v["NWG"] % (v["NDIMC"] * v["VWN"]) != 0:
        bad.append("NWG not divisible by NDIMC*VWN")

    if v["SA"]:
        if v["MWG"] % (v["MDIMA"] * v["VWM"]) != 0:
            bad.append("MWG not divisible by MDIMA*VWM")
        if threads % v["MDIMA"] != 0:
            bad.append("MDIMC*NDIMC not divisible by MDIMA")
        elif v["KWG"] % (threads // v["MDIMA"]) != 0:
            bad.append("KWG not divisible by (MDIMC*NDIMC)/MDIMA")
    if v["SB"]:
        if v["NWG"] % (v["NDIMB"] * v["VWN"]) != 0:
            bad.append("NWG not divisible by NDIMB*VWN")
        if threads % v["NDIMB"] != 0:
            bad.append("MDIMC*NDIMC not divisible by NDIMB")
        elif v["KWG"] % (threads // v["NDIMB"]) != 0:
            bad.append("KWG not divisible by (MDIMC*NDIMC)/NDIMB")

    return Verdict(not bad, bad)


def validate_config(config: Configuration, device: DeviceSpec, precision: Precision) -> Verdict:
    """Constraint filter for any family."""
    if config.family == "gemm":
        return validate_gemm_params(config, device, precision)
    bad = []
    threads = work_group_threads(config)
    if threads > device.max_work_group_size:
        bad.append(
            f"work-group too large: {threads} > {device.max_work_group_size}"
        )
    return Verdict(not bad, bad)


def require_valid(config: Configuration, device: DeviceSpec, precision: Precision) -> None:
    verdict = validate_config(config, device, precision)
    if not verdict:
        raise ValidationError(
            f"invalid configuration {config}: {'; '.join(verdict.violations)}",
            verdict.violations,
        )


def default_config(family: str, device: DeviceSpec, precision: Precision) -> Configuration:
    """Built-in baseline used when neither an override nor a database entry applies.

    Falls back to the first valid curated entry on very constrained devices.
    """
    preferred = {
        "axpy": AxpyParams(),
        "dot": DotParams(),
        "gemv": GemvParams(),
        "ger": GerParams(),
        "gemm": GemmParams(MWG=64, NWG=64, KWG=16, KWI=8),
        "transform": TransformParams(),
    }
    cfg = preferred[family].to_config()
    if validate_config(cfg, device, precision):
        return cfg
    for cand in curated_configurations(family):
        if validate_config(cand, device, precision):
            return cand
    raise ValidationError(
        f"no valid {family} configuration for device {device.name!r}", []
    )
