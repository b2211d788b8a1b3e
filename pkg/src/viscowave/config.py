"""Strict TOML run configuration for the command-line runner.

A run is described by one TOML file with nested blocks (basis, kernel,
time, ...).  Parsing is strict: unknown keys anywhere are rejected, every
referenced file must exist, and the step h must divide the horizon(s) to
1e-12 relative accuracy.  The resolved configuration (defaults applied) is
embedded verbatim in every JSON report for provenance.
"""

import math
import os

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

import numpy as np

from .basis import basis_from_csv, interval_basis, rectangle_basis
from .errors import ConfigError
from .kernels import MemoryKernel

_SCHEMA = {
    "seed": None,
    "basis": {
        "type": None, "modes": None, "length": None, "control_end": None,
        "nx": None, "ny": None, "lx": None, "ly": None, "edge": None,
        "n_quad": None, "path": None,
    },
    "kernel": {"type": None, "terms": None, "path": None},
    "time": {"h": None, "T": None, "T1": None},
    "control": {
        "target_xi": None, "target_eta": None, "target_xi_mode": None,
        "target_eta_mode": None, "reg": None, "profiles": None,
    },
    "initial": {"xi": None, "eta": None, "xi_mode": None, "eta_mode": None},
    "verify": {"samples": None, "modes": None},
    "sweep": {"parameter": None, "values": None},
    "output": {"dir": None},
}

_SWEEPABLE = ("time.T", "time.T1", "time.h")


def _check_keys(data, schema, path=""):
    for key, value in data.items():
        if key not in schema:
            raise ConfigError(f"unknown config key {path}{key!r}")
        sub = schema[key]
        if isinstance(sub, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config block {path}{key!r} must be a table")
            _check_keys(value, sub, path=f"{path}{key}.")


def load_config(path):
    """Parse and validate a TOML run configuration."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    _check_keys(cfg, _SCHEMA)
    cfg.setdefault("seed", 0)
    if not isinstance(cfg["seed"], int) or cfg["seed"] < 0:
        raise ConfigError("seed must be a nonnegative integer")
    _validate_paths(cfg, os.path.dirname(os.path.abspath(path)))
    if "time" in cfg:
        validate_time(cfg["time"])
    return cfg


def _validate_paths(cfg, base_dir):
    for block, key in (("basis", "path"), ("kernel", "path")):
        ref = cfg.get(block, {}).get(key)
        if ref is not None:
            full = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
            if not os.path.exists(full):
                raise ConfigError(f"{block}.path does not exist: {ref}")
            cfg[block][key] = full


def validate_time(time_cfg):
    h = time_cfg.get("h")
    if h is None or not h > 0.0:
        raise ConfigError("time.h must be a positive number")
    for key in ("T", "T1"):
        horizon = time_cfg.get(key)
        if horizon is None:
            continue
        if not horizon > 0.0:
            raise ConfigError(f"time.{key} must be positive")
        steps = round(horizon / h)
        if steps < 1 or abs(steps * h - horizon) > 1e-12 * max(1.0, horizon):
            raise ConfigError(
                f"time.h = {h} does not divide time.{key} = {horizon}"
            )
    if "T" not in time_cfg:
        raise ConfigError("time.T is required")


def require_block(cfg, name):
    if name not in cfg:
        raise ConfigError(f"missing required config block [{name}]")
    return cfg[name]


def build_basis(cfg):
    """Construct the eigenbasis described by the [basis] block."""
    block = require_block(cfg, "basis")
    kind = block.get("type")
    if kind == "interval":
        try:
            return interval_basis(
                int(block.get("modes", 0)),
                float(block.get("length", 0.0)),
                block.get("control_end", "left"),
            )
        except ValueError as exc:
            raise ConfigError(f"basis: {exc}") from exc
    if kind == "rectangle":
        try:
            return rectangle_basis(
                int(block.get("nx", 0)), int(block.get("ny", 0)),
                float(block.get("lx", 0.0)), float(block.get("ly", 0.0)),
                block.get("edge", "bottom"), int(block.get("n_quad", 33)),
            )
        except ValueError as exc:
            raise ConfigError(f"basis: {exc}") from exc
    if kind == "file":
        if "path" not in block:
            raise ConfigError("basis.path is required for type = 'file'")
        try:
            return basis_from_csv(block["path"])
        except ValueError as exc:
            raise ConfigError(f"basis file: {exc}") from exc
    raise ConfigError(f"unknown basis.type {kind!r}")


def read_kernel_csv(path):
    """Read a sampled kernel from CSV rows (t, M(t)) on a uniform grid."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.lower().startswith("t,"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ConfigError(f"{path}: expected rows 't,M', got {line!r}")
            rows.append((float(parts[0]), float(parts[1])))
    if len(rows) < 3:
        raise ConfigError(f"{path}: sampled kernel needs at least 3 rows")
    t = np.array([r[0] for r in rows])
    vals = np.array([r[1] for r in rows])
    if t[0] != 0.0:
        raise ConfigError(f"{path}: kernel samples must start at t = 0")
    h = t[1] - t[0]
    if h <= 0.0 or not np.allclose(np.diff(t), h, rtol=1e-9, atol=1e-12 * h):
        raise ConfigError(f"{path}: kernel sample grid is not uniform")
    return MemoryKernel.sampled(vals, h)


def build_kernel(cfg):
    """Construct the memory kernel described by the [kernel] block."""
    block = cfg.get("kernel")
    if block is None:
        return MemoryKernel.zero()
    kind = block.get("type")
    if kind == "zero":
        return MemoryKernel.zero()
    if kind == "prony":
        terms = block.get("terms")
        if terms is None:
            raise ConfigError("kernel.terms is required for type = 'prony'")
        try:
            pairs = [(float(c), float(g)) for c, g in terms]
        except (TypeError, ValueError) as exc:
            raise ConfigError(
                "kernel.terms must be a list of [weight, rate] pairs"
            ) from exc
        try:
            return MemoryKernel.prony(pairs)
        except ValueError as exc:
            raise ConfigError(f"kernel: {exc}") from exc
    if kind == "sampled":
        if "path" not in block:
            raise ConfigError("kernel.path is required for type = 'sampled'")
        return read_kernel_csv(block["path"])
    raise ConfigError(f"unknown kernel.type {kind!r}")


def kernel_descriptor(cfg):
    """Short human-readable kernel tag for reports."""
    block = cfg.get("kernel")
    if block is None or block.get("type") == "zero":
        return "zero"
    if block.get("type") == "prony":
        parts = [f"{float(c):g}*exp(-{float(g):g} t)"
                 for c, g in block["terms"]]
        return " + ".join(parts)
    return f"sampled:{os.path.basename(block['path'])}"


def coefficient_vector(block, n_modes, name):
    """Resolve a coefficient list or unit-mode shorthand from a config block.

    Accepts '<name>' (explicit list, padded with zeros) or '<name>_mode'
    (1-based unit coefficient); absent means zero.
    """
    explicit = block.get(name)
    mode = block.get(f"{name}_mode")
    if explicit is not None and mode is not None:
        raise ConfigError(f"give either {name} or {name}_mode, not both")
    vec = np.zeros(n_modes)
    if explicit is not None:
        vals = np.asarray(explicit, dtype=float)
        if vals.size > n_modes:
            raise ConfigError(f"{name} has more entries than basis modes")
        vec[: vals.size] = vals
    elif mode is not None:
        mode = int(mode)
        if not 1 <= mode <= n_modes:
            raise ConfigError(f"{name}_mode out of range 1..{n_modes}")
        vec[mode - 1] = 1.0
    return vec


def sweep_spec(cfg):
    """Validated (dotted parameter path, values list) of the [sweep] block."""
    block = require_block(cfg, "sweep")
    param = block.get("parameter")
    if param not in _SWEEPABLE:
        raise ConfigError(
            f"sweep.parameter must be one of {_SWEEPABLE}, got {param!r}"
        )
    values = block.get("values")
    if not values or not isinstance(values, list):
        raise ConfigError("sweep.values must be a nonempty list")
    out = []
    for v in values:
        if not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
            raise ConfigError("sweep.values must be positive numbers")
        out.append(float(v))
    return param, out
