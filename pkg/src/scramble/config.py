"""Flat key = value configuration files for the CLI.

Values may be integers, rationals like 1/3, decimals, booleans, names, or
comma-separated lists of those.  '#' starts a comment.  Errors carry the
file line so the CLI can point at the offending entry."""

from __future__ import annotations

from fractions import Fraction

from .errors import ConfigError
from .sweep import SweepConfig


def read_kv_file(path: str) -> dict[str, tuple[str, int]]:
    """Map key -> (raw value, line number)."""
    entries: dict[str, tuple[str, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError("expected 'key = value'", path, lineno)
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ConfigError("empty key", path, lineno)
            if key in entries:
                raise ConfigError(f"duplicate key {key!r}", path, lineno)
            entries[key] = (value, lineno)
    return entries


def _fraction(raw: str, path: str, line: int) -> Fraction:
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse {raw!r} as a rational number", path, line)


def _int(raw: str, path: str, line: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"cannot parse {raw!r} as an integer", path, line)


def _bool(raw: str, path: str, line: int) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ConfigError(f"cannot parse {raw!r} as a boolean", path, line)


def _split(raw: str) -> list[str]:
    return [tok.strip() for tok in raw.split(",") if tok.strip()]


_SWEEP_KEYS = {
    "model",
    "gamma",
    "n_list",
    "p_grid",
    "tau_grid",
    "realizations",
    "seed",
    "quantities",
    "product_mode",
    "s_offset",
    "resample_pairing",
    "fmfic_h_x",
    "fmfic_h_y",
    "fmfic_j",
    "fmfic_delta",
    "ensemble_cap",
    "negativity_dim_cap",
    "state_bytes_cap",
    "dense_dim_cap",
    "threads",
}

_SWEEP_REQUIRED = ("model", "gamma", "n_list", "p_grid", "tau_grid")


def load_sweep_config(path: str) -> SweepConfig:
    entries = read_kv_file(path)
    unknown = set(entries) - _SWEEP_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key {key!r}", path, entries[key][1])
    for key in _SWEEP_REQUIRED:
        if key not in entries:
            raise ConfigError(f"missing required key {key!r}", path)

    kwargs: dict = {}
    kwargs["model"] = entries["model"][0]
    kwargs["gamma"] = _fraction(entries["gamma"][0], path, entries["gamma"][1])
    raw, line = entries["n_list"]
    kwargs["n_list"] = tuple(_int(tok, path, line) for tok in _split(raw))
    for grid in ("p_grid", "tau_grid"):
        raw, line = entries[grid]
        kwargs[grid] = tuple(_fraction(tok, path, line) for tok in _split(raw))
    if "realizations" in entries:
        kwargs["realizations"] = _int(
            entries["realizations"][0], path, entries["realizations"][1]
        )
    if "seed" in entries:
        kwargs["master_seed"] = _int(entries["seed"][0], path, entries["seed"][1])
    if "quantities" in entries:
        kwargs["quantities"] = tuple(_split(entries["quantities"][0]))
    if "product_mode" in entries:
        kwargs["product_mode"] = entries["product_mode"][0]
    if "s_offset" in entries:
        kwargs["s_offset"] = _int(entries["s_offset"][0], path, entries["s_offset"][1])
    if "resample_pairing" in entries:
        kwargs["resample_pairing"] = _bool(
            entries["resample_pairing"][0], path, entries["resample_pairing"][1]
        )
    fmfic = {}
    for short in ("h_x", "h_y", "j", "delta"):
        key = f"fmfic_{short}"
        if key in entries:
            try:
                fmfic[short] = float(Fraction(entries[key][0]))
            except (ValueError, ZeroDivisionError):
                raise ConfigError(
                    f"cannot parse {entries[key][0]!r} as a number", path, entries[key][1]
                )
    if fmfic:
        kwargs["fmfic_params"] = fmfic
    for key in ("ensemble_cap", "negativity_dim_cap", "state_bytes_cap", "dense_dim_cap", "threads"):
        if key in entries:
            kwargs[key] = _int(entries[key][0], path, entries[key][1])
    return SweepConfig(**kwargs)


_THEORY_KEYS = {"n", "gamma", "p", "samples", "seed"}
_SELFAVG_KEYS = {"n_list", "gamma", "p", "realizations", "seed", "product_mode"}


def load_theory_config(path: str) -> dict:
    entries = read_kv_file(path)
    unknown = set(entries) - _THEORY_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key {key!r}", path, entries[key][1])
    for key in ("n", "gamma", "p", "samples"):
        if key not in entries:
            raise ConfigError(f"missing required key {key!r}", path)
    out = {
        "n": _int(entries["n"][0], path, entries["n"][1]),
        "gamma": _fraction(entries["gamma"][0], path, entries["gamma"][1]),
        "p": _fraction(entries["p"][0], path, entries["p"][1]),
        "samples": _int(entries["samples"][0], path, entries["samples"][1]),
        "seed": _int(entries["seed"][0], path, entries["seed"][1]) if "seed" in entries else 0,
    }
    if out["samples"] < 1:
        raise ConfigError("samples must be >= 1", path, entries["samples"][1])
    return out


def load_selfavg_config(path: str) -> dict:
    entries = read_kv_file(path)
    unknown = set(entries) - _SELFAVG_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key {key!r}", path, entries[key][1])
    for key in ("n_list", "gamma", "p", "realizations"):
        if key not in entries:
            raise ConfigError(f"missing required key {key!r}", path)
    raw, line = entries["n_list"]
    return {
        "n_list": tuple(_int(tok, path, line) for tok in _split(raw)),
        "gamma": _fraction(entries["gamma"][0], path, entries["gamma"][1]),
        "p": _fraction(entries["p"][0], path, entries["p"][1]),
        "realizations": _int(entries["realizations"][0], path, entries["realizations"][1]),
        "seed": _int(entries["seed"][0], path, entries["seed"][1]) if "seed" in entries else 0,
        "product_mode": entries.get("product_mode", ("zero", 0))[0],
    }
