"""Persistent tuning results, the defaults hierarchy, and runtime overrides.

The database is an append-only collection of tuning runs keyed by kernel
family, precision, device identity and argument sizes.  Group defaults
(architecture, vendor, device type, global) are derived by picking, for each
group, the configuration with the best geometric-mean relative slowdown
across the group's devices.  Runtime overrides shadow everything for exact
key matches without mutating the stored entries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .core import DeviceSpec, Precision
from .errors import DbLookupError
from .kernels import Configuration, validate_config

__all__ = [
    "DbKey",
    "Database",
    "ParameterStore",
    "db_insert",
    "db_lookup",
    "compute_defaults",
    "override_parameters",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1

#: Canonical tuning sizes per family: database entries at these args are
#: preferred when a lookup only matches on device, not argument sizes.
CANONICAL_ARGS = {
    "gemm": (1024, 1024, 1024),
    "gemv": (1024, 1024, 0),
    "ger": (1024, 1024, 0),
    "axpy": (0, 1 << 20, 0),
    "dot": (0, 1 << 20, 0),
    "transform": (1024, 1024, 0),
}

_GROUP_LEVELS = ("architecture", "vendor", "device_type", "global")


@dataclass(frozen=True, order=True)
class DbKey:
    """Identity of one tuning run: what was tuned, for which device and sizes."""

    family: str
    precision: str
    device: str
    architecture: str
    vendor: str
    device_type: str
    args: tuple  # (m, n, k); unused dimensions are zero

    @classmethod
    def for_task(cls, family: str, precision: Precision, device: DeviceSpec,
                 args: tuple) -> "DbKey":
        m, n, k = (tuple(args) + (0, 0, 0))[:3]
        return cls(
            family=family,
            precision=precision.value,
            device=device.name,
            architecture=device.architecture,
            vendor=device.vendor,
            device_type=device.device_type,
            args=(int(m), int(n), int(k)),
        )


@dataclass
class DbEntry:
    """One stored run: every measurement kept, plus the winning configuration."""

    key: DbKey
    measurements: list  # of dicts: params / per_run_times_s / mean_time_s / status
    best: Configuration


class Database:
    """In-memory tuning database with JSON round-tripping."""

    def __init__(self):
        self.entries: dict[DbKey, DbEntry] = {}
        self._defaults: dict | None = None

    # -- mutation ---------------------------------------------------------

    def insert(self, entry: DbEntry) -> None:
        existing = self.entries.get(entry.key)
        if existing is not None:
            # Keep whichever run found the faster best configuration.
            if _best_time(entry) >= _best_time(existing):
                return
        self.entries[entry.key] = entry
        self._defaults = None

    # -- defaults ---------------------------------------------------------

    @property
    def defaults(self) -> dict:
        if self._defaults is None:
            self._defaults = compute_defaults(self)
        return self._defaults

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "entries": [
                {
                    "key": {
                        "family": e.key.family,
                        "precision": e.key.precision,
                        "device": e.key.device,
                        "architecture": e.key.architecture,
                        "vendor": e.key.vendor,
                        "device_type": e.key.device_type,
                        "args": {"m": e.key.args[0], "n": e.key.args[1], "k": e.key.args[2]},
                    },
                    "measurements": e.measurements,
                    "best": e.best.as_dict(),
                }
                for e in self.entries.values()
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Database":
        db = cls()
        for raw in doc.get("entries", []):
            k = raw["key"]
            key = DbKey(
                family=k["family"],
                precision=k["precision"],
                device=k["device"],
                architecture=k["architecture"],
                vendor=k["vendor"],
                device_type=k["device_type"],
                args=(k["args"].get("m", 0), k["args"].get("n", 0), k["args"].get("k", 0)),
            )
            best = Configuration.make(key.family, raw["best"])
            db.entries[key] = DbEntry(key=key, measurements=list(raw["measurements"]), best=best)
        return db

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "Database":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def _best_time(entry: DbEntry) -> float:
    times = [m["mean_time_s"] for m in entry.measurements if m.get("status") == "ok"]
    return min(times) if times else math.inf


def db_insert(db: Database, run) -> Database:
    """Insert a finished tuning run (see :mod:`tunedblas.tuner`) into ``db``."""
    db.insert(run.to_db_entry())
    return db


# ---------------------------------------------------------------------------
# Defaults aggregation
# ---------------------------------------------------------------------------

def _ok_times_per_device(db: Database, family: str, precision: str):
    """Pooled config -> best observed mean time, per device, for one routine key."""
    pools: dict[str, dict] = {}
    meta: dict[str, DbKey] = {}
    for key, entry in db.entries.items():
        if key.family != family or key.precision != precision:
            continue
        pool = pools.setdefault(key.device, {})
        meta.setdefault(key.device, key)
        for m in entry.measurements:
            if m.get("status") != "ok":
                continue
            cfg = Configuration.make(family, m["params"])
            t = float(m["mean_time_s"])
            if cfg not in pool or t < pool[cfg]:
                pool[cfg] = t
    return pools, meta


def _pick_group_default(device_pools: list[dict]) -> Configuration | None:
    """Geometric-mean-best configuration across a group of devices.

    Prefers configurations measured on every device; otherwise the one
    covering the most devices, ties broken by lower geometric mean.
    """
    if not device_pools:
        return None
    rel: list[dict] = []
    for pool in device_pools:
        if not pool:
            continue
        best = min(pool.values())
        rel.append({cfg: t / best for cfg, t in pool.items()})
    if not rel:
        return None

    coverage: dict = {}
    for r in rel:
        for cfg in r:
            coverage[cfg] = coverage.get(cfg, 0) + 1
    max_cov = max(coverage.values())

    def geomean(cfg):
        vals = [r[cfg] for r in rel if cfg in r]
        return math.exp(sum(math.log(v) for v in vals) / len(vals))

    candidates = [cfg for cfg, cov in coverage.items() if cov == max_cov]
    return min(candidates, key=lambda cfg: (geomean(cfg), cfg.values))


def compute_defaults(db: Database) -> dict:
    """Defaults for every (group level, group value, family, precision)."""
    defaults: dict = {}
    routine_keys = {(k.family, k.precision) for k in db.entries}
    for family, precision in routine_keys:
        pools, meta = _ok_times_per_device(db, family, precision)
        groups: dict = {}
        for device, key in meta.items():
            groups.setdefault(("architecture", key.architecture), []).append(device)
            groups.setdefault(("vendor", key.vendor), []).append(device)
            groups.setdefault(("device_type", key.device_type), []).append(device)
            groups.setdefault(("global", ""), []).append(device)
        for (level, value), devices in groups.items():
            cfg = _pick_group_default([pools[d] for d in devices])
            if cfg is not None:
                defaults[(level, value, family, precision)] = cfg
    return defaults


# ---------------------------------------------------------------------------
# Lookup
# ---------------------------------------------------------------------------

def db_lookup(db: Database, device: DeviceSpec, family: str, precision: Precision,
              args: tuple) -> tuple[Configuration, str]:
    """Most specific available configuration and the fallback level used.

    Chain: exact device+args, exact device (any args), architecture default,
    vendor default, device-type default, global default.
    """
    if not db.entries:
        raise DbLookupError("no defaults available: tuning database is empty")
    key = DbKey.for_task(family, precision, device, args)

    exact = db.entries.get(key)
    if exact is not None:
        return exact.best, "device"

    same_device = [
        e for k, e in db.entries.items()
        if k.family == key.family and k.precision == key.precision and k.device == key.device
    ]
    if same_device:
        canonical = CANONICAL_ARGS.get(family)
        preferred = [e for e in same_device if e.key.args == canonical]
        entry = preferred[0] if preferred else min(same_device, key=lambda e: e.key.args)
        return entry.best, "device_any_args"

    defaults = db.defaults
    for level, value in (
        ("architecture", device.architecture),
        ("vendor", device.vendor),
        ("device_type", device.device_type),
        ("global", ""),
    ):
        cfg = defaults.get((level, value, family, precision.value))
        if cfg is not None:
            return cfg, level
    raise DbLookupError(
        f"no defaults available for family {family!r} precision {precision.value}"
    )


# ---------------------------------------------------------------------------
# Runtime overrides
# ---------------------------------------------------------------------------

@dataclass
class ParameterStore:
    """Configuration resolution state: optional database plus overrides.

    Routine calls resolve their configuration here; overrides win over the
    database, which wins over the built-in baseline.  The direct/indirect
    matmul routing threshold also lives here so it can be re-tuned per device.
    """

    database: Database | None = None
    direct_threshold: int = 128
    _overrides: dict = field(default_factory=dict)

    def override_key(self, family: str, precision: Precision, device: DeviceSpec,
                     args: tuple) -> tuple:
        m, n, k = (tuple(args) + (0, 0, 0))[:3]
        return (family, precision.value, device.name, (int(m), int(n), int(k)))

    def set_override(self, family: str, precision: Precision, device: DeviceSpec,
                     args: tuple, config: Configuration) -> None:
        verdict = validate_config(config, device, precision)
        if not verdict:
            from .errors import ValidationError

            raise ValidationError(
                f"override rejected for {family}: {'; '.join(verdict.violations)}",
                verdict.violations,
            )
        self._overrides[self.override_key(family, precision, device, args)] = config

    def clear_overrides(self) -> None:
        self._overrides.clear()

    def resolve(self, family: str, precision: Precision, device: DeviceSpec,
                args: tuple) -> tuple[Configuration, str]:
        """(configuration, source level); always succeeds on a sane device."""
        from .kernels import default_config

        cfg = self._overrides.get(self.override_key(family, precision, device, args))
        if cfg is not None:
            return cfg, "override"
        if self.database is not None and self.database.entries:
            try:
                cfg, level = db_lookup(self.database, device, family, precision, args)
                if validate_config(cfg, device, precision):
                    return cfg, level
            except DbLookupError:
                pass
        return default_config(family, device, precision), "builtin"


def override_parameters(store: ParameterStore, family: str, precision: Precision,
                        device: DeviceSpec, args: tuple, config: Configuration) -> None:
    """Install a runtime override (validated against the device on set)."""
    store.set_override(family, precision, device, args, config)
