"""Readers for the documented scramble CSV schemas.

Sweep CSV header: N,p,tau,realization,quantity,value
Critical CSV header: coordinate,critical_value,err_lo,err_hi,flag
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

SWEEP_HEADER = ["N", "p", "tau", "realization", "quantity", "value"]
CRITICAL_HEADER = ["coordinate", "critical_value", "err_lo", "err_hi", "flag"]


class SchemaError(ValueError):
    """Input CSV does not follow the documented schema."""


@dataclass
class CellTable:
    """Per-(N, p, tau) mean and standard error of one quantity."""

    quantity: str
    sizes: list[int]
    cells: dict  # (n, p, tau) -> (mean, se)

    def grid(self, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(p values, tau values, mean array, se array) for one size; cells
        missing from the rectangle become NaN."""
        keys = [k for k in self.cells if k[0] == n]
        p_vals = np.array(sorted({p for _, p, _ in keys}))
        tau_vals = np.array(sorted({t for _, _, t in keys}))
        means = np.full((len(p_vals), len(tau_vals)), np.nan)
        ses = np.full_like(means, np.nan)
        p_idx = {p: i for i, p in enumerate(p_vals)}
        t_idx = {t: j for j, t in enumerate(tau_vals)}
        for (_, p, t), (m, s) in ((k, v) for k, v in self.cells.items() if k[0] == n):
            means[p_idx[p], t_idx[t]] = m
            ses[p_idx[p], t_idx[t]] = s
        return p_vals, tau_vals, means, ses


def read_sweep_table(path: str, quantity: str) -> CellTable:
    groups: dict[tuple, list[float]] = defaultdict(list)
    quantities_seen = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SWEEP_HEADER:
            raise SchemaError(f"bad sweep CSV header {header}, expected {SWEEP_HEADER}")
        for row in reader:
            if len(row) != 6:
                raise SchemaError(f"bad sweep CSV row: {row}")
            n, p, tau, _, q, value = row
            quantities_seen.add(q)
            if q == quantity:
                groups[(int(n), float(p), float(tau))].append(float(value))
    if not groups:
        raise SchemaError(
            f"quantity {quantity!r} not present in {path}; found {sorted(quantities_seen)}"
        )
    cells = {}
    for key, vals in groups.items():
        arr = np.asarray(vals)
        se = float(np.std(arr, ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
        cells[key] = (float(np.mean(arr)), se)
    return CellTable(quantity, sorted({k[0] for k in cells}), cells)


def read_critical_rows(path: str) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CRITICAL_HEADER:
            raise SchemaError(f"bad critical CSV header {reader.fieldnames}")
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
