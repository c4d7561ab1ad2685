"""CSV / JSON serialisation of sweep results, critical-line tables, and the
run manifest with output hashes."""

from __future__ import annotations

import csv
import hashlib
import json
from fractions import Fraction
from pathlib import Path

from .sweep import CriticalEstimate, SweepConfig, SweepRecord, SweepResult

SWEEP_HEADER = ["N", "p", "tau", "realization", "quantity", "value"]
CRITICAL_HEADER = ["coordinate", "critical_value", "err_lo", "err_hi", "flag"]


def fmt_float(x: float) -> str:
    """17 significant digits: lossless float64 round trip."""
    return format(x, ".17g")


def write_sweep_csv(result: SweepResult, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        for rec in result.records:
            writer.writerow(
                [
                    rec.n,
                    fmt_float(rec.p),
                    fmt_float(rec.tau),
                    rec.realization,
                    rec.quantity,
                    fmt_float(rec.value),
                ]
            )


def read_sweep_records(path: str | Path) -> list[SweepRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SWEEP_HEADER:
            raise ValueError(f"bad sweep CSV header {header}, expected {SWEEP_HEADER}")
        return [
            SweepRecord(int(n), float(p), float(tau), int(r), q, float(v))
            for n, p, tau, r, q, v in reader
        ]


def sweep_result_to_json(result: SweepResult) -> dict:
    return {
        "config": result.config.canonical_dict(),
        "config_hash": result.config.config_hash(),
        "records": [list(rec) for rec in result.records],
    }


def write_sweep_json(result: SweepResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(sweep_result_to_json(result), fh, indent=1)
        fh.write("\n")


def sweep_result_from_json(doc: dict) -> SweepResult:
    cfg = doc["config"]
    config = SweepConfig(
        model=cfg["model"],
        gamma=Fraction(cfg["gamma"]),
        n_list=tuple(cfg["n_list"]),
        p_grid=tuple(Fraction(p) for p in cfg["p_grid"]),
        tau_grid=tuple(Fraction(t) for t in cfg["tau_grid"]),
        realizations=cfg["realizations"],
        master_seed=cfg["seed"],
        product_mode=cfg["product_mode"],
        quantities=tuple(cfg["quantities"]),
        s_offset=cfg["s_offset"],
        resample_pairing=cfg["resample_pairing"],
        fmfic_params=cfg["fmfic_params"],
        ensemble_cap=cfg["ensemble_cap"],
        negativity_dim_cap=cfg["negativity_dim_cap"],
        state_bytes_cap=cfg["state_bytes_cap"],
        dense_dim_cap=cfg["dense_dim_cap"],
    )
    records = [
        SweepRecord(int(n), float(p), float(t), int(r), q, float(v))
        for n, p, t, r, q, v in doc["records"]
    ]
    return SweepResult(config, records)


def read_sweep_json(path: str | Path) -> SweepResult:
    with open(path, encoding="utf-8") as fh:
        return sweep_result_from_json(json.load(fh))


def write_critical_csv(estimates: list[CriticalEstimate], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CRITICAL_HEADER)
        for est in estimates:
            writer.writerow(
                [
                    fmt_float(est.coordinate),
                    fmt_float(est.value),
                    fmt_float(est.lower_err),
                    fmt_float(est.upper_err),
                    est.flag,
                ]
            )


def read_critical_csv(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CRITICAL_HEADER:
            raise ValueError(f"bad critical CSV header {reader.fieldnames}")
        return [
            {
                "coordinate": float(row["coordinate"]),
                "critical_value": float(row["critical_value"]),
                "err_lo": float(row["err_lo"]),
                "err_hi": float(row["err_hi"]),
                "flag": row["flag"],
            }
            for row in reader
        ]


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(
    path: str | Path,
    command: str,
    config_echo: dict,
    master_seed: int,
    outputs: list[str | Path],
    started: str,
    finished: str,
    version: str,
) -> None:
    doc = {
        "tool": "scramble",
        "version": version,
        "command": command,
        "config": config_echo,
        "master_seed": master_seed,
        "started": started,
        "finished": finished,
        "outputs": [
            {"path": Path(p).name, "sha256": sha256_file(p)} for p in outputs
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def verify_manifest(manifest_path: str | Path) -> list[str]:
    """Names of recorded outputs whose current hash no longer matches."""
    manifest_path = Path(manifest_path)
    with open(manifest_path, encoding="utf-8") as fh:
        doc = json.load(fh)
    bad = []
    for entry in doc["outputs"]:
        target = manifest_path.parent / entry["path"]
        if not target.exists() or sha256_file(target) != entry["sha256"]:
            bad.append(entry["path"])
    return bad
