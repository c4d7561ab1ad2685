"""Figure rendering: (p, tau) phase-diagram heatmaps with critical-line
overlays, and order-parameter slices versus p for several sizes."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .sweep_csv import read_critical_rows, read_sweep_table

# fixed style so output bytes depend only on the input data
plt.rcParams.update(
    {
        "figure.dpi": 110,
        "savefig.dpi": 110,
        "font.size": 10,
        "axes.grid": False,
        "svg.hashsalt": "scramble-plots",
    }
)

_METADATA = {"Software": "scramble-plots"}

QUANTITY_LABELS = {
    "negativity": r"$\mathcal{N}_{RS}$",
    "D_RS": r"$\mathcal{D}_{RS}$",
    "Delta_RS": r"$\Delta_{RS}$",
    "mutual_info": r"$\mathcal{I}_{RS}$",
    "purity_S": r"$\mathrm{Tr}\,\rho_S^2$",
    "purity_RS": r"$\mathrm{Tr}\,\rho_{RS}^2$",
}

# which analytic marker a sliced quantity crosses: entanglement transition
# at (1-gamma)/2, measurement invisibility at 1-gamma
_MARKER_FOR = {"negativity": 0, "mutual_info": 0, "D_RS": 1, "Delta_RS": 1}


def analytic_markers(gamma: float) -> tuple[float, float]:
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    return (1 - gamma) / 2, 1 - gamma


@dataclass
class PlotSpec:
    sweep_csv: str
    quantity: str
    out_path: str
    gamma: float
    critical_csv: str | None = None
    fix_axis: str | None = None  # for slices: "tau" or "p"
    fix_value: float | None = None
    title: str | None = None


def _edges(vals: np.ndarray) -> np.ndarray:
    """Cell edges for pcolormesh; degenerate single-value axes get a small
    symmetric pad."""
    if len(vals) == 1:
        half = 0.05 if vals[0] == 0 else max(abs(vals[0]) * 0.05, 0.05)
        return np.array([vals[0] - half, vals[0] + half])
    mids = (vals[:-1] + vals[1:]) / 2
    return np.concatenate([[2 * vals[0] - mids[0]], mids, [2 * vals[-1] - mids[-1]]])


def render_phase_diagram(spec: PlotSpec) -> str:
    """Heatmap of the largest-N cell means over (p, tau), critical estimates
    with asymmetric error bars, and vertical analytic markers."""
    table = read_sweep_table(spec.sweep_csv, spec.quantity)
    n_big = table.sizes[-1]
    p_vals, tau_vals, means, _ = table.grid(n_big)
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    mesh = ax.pcolormesh(
        _edges(p_vals), _edges(tau_vals), means.T, cmap="viridis", shading="flat"
    )
    fig.colorbar(mesh, ax=ax, label=QUANTITY_LABELS.get(spec.quantity, spec.quantity))

    if spec.critical_csv is not None:
        try:
            rows = [r for r in read_critical_rows(spec.critical_csv) if r["flag"] == "ok"]
        except (OSError, ValueError) as exc:
            print(f"warning: skipping critical overlay: {exc}", file=sys.stderr)
            rows = []
        if rows:
            xs = np.array([r["critical_value"] for r in rows])
            ys = np.array([r["coordinate"] for r in rows])
            err_lo = xs - np.array([r["err_lo"] for r in rows])
            err_hi = np.array([r["err_hi"] for r in rows]) - xs
            ax.errorbar(
                xs,
                ys,
                xerr=np.vstack([err_lo, err_hi]),
                fmt="o",
                color="white",
                mec="black",
                capsize=3,
                label="critical estimate",
            )

    p_c_n, p_c_d = analytic_markers(spec.gamma)
    ax.axvline(p_c_n, color="crimson", ls="--", lw=1.2, label=r"$(1-\gamma)/2$")
    ax.axvline(p_c_d, color="purple", ls="--", lw=1.2, label=r"$1-\gamma$")
    ax.set_xlabel("$p$")
    ax.set_ylabel(r"$\tau$")
    ax.set_title(spec.title or f"phase diagram, N = {n_big}")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out_path, metadata=_METADATA)
    plt.close(fig)
    return spec.out_path


def render_slices(spec: PlotSpec) -> str:
    """One curve per size with standard-error bars along the free axis, with
    a star at the analytic critical point when the scan runs over p."""
    if spec.fix_axis not in ("tau", "p"):
        raise ValueError("render_slices needs fix_axis 'tau' or 'p'")
    table = read_sweep_table(spec.sweep_csv, spec.quantity)
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    sizes_drawn = []
    star_y = None
    for n in table.sizes:
        p_vals, tau_vals, means, ses = table.grid(n)
        if spec.fix_axis == "tau":
            sel = np.isclose(tau_vals, spec.fix_value, atol=1e-9)
            if not sel.any():
                continue
            xs, ys, es = p_vals, means[:, sel][:, 0], ses[:, sel][:, 0]
        else:
            sel = np.isclose(p_vals, spec.fix_value, atol=1e-9)
            if not sel.any():
                continue
            xs, ys, es = tau_vals, means[sel, :][0], ses[sel, :][0]
        keep = ~np.isnan(ys)
        if not keep.any():
            continue
        ax.errorbar(xs[keep], ys[keep], yerr=es[keep], marker="o", ms=3, lw=1, label=f"N = {n}")
        sizes_drawn.append(n)
        star_y = float(np.nanmin(ys)) if star_y is None else min(star_y, float(np.nanmin(ys)))
    if len(sizes_drawn) < 2:
        raise ValueError(
            f"need >= 2 sizes with data at fixed {spec.fix_axis} = {spec.fix_value}, "
            f"got {len(sizes_drawn)}"
        )
    if spec.fix_axis == "tau":
        markers = analytic_markers(spec.gamma)
        which = _MARKER_FOR.get(spec.quantity)
        if which is not None:
            ax.plot(
                [markers[which]],
                [star_y],
                marker="*",
                ms=14,
                color="crimson",
                ls="none",
                label="analytic critical point",
            )
        ax.set_xlabel("$p$")
    else:
        ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(QUANTITY_LABELS.get(spec.quantity, spec.quantity))
    ax.set_title(spec.title or f"{spec.quantity} at {spec.fix_axis} = {spec.fix_value:g}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out_path, metadata=_METADATA)
    plt.close(fig)
    return spec.out_path
