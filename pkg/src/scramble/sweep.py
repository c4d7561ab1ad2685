"""Phase-diagram orchestration: (p, tau) sweeps over models, sizes and
realizations, fractional-size weighting, grid interpolation, critical-line
estimation, and the self-averaging diagnostics."""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple

import numpy as np

from .ensemble import ensemble_D_RS, ensemble_Delta_RS, ensemble_from_state
from .errors import ConfigError, ResourceLimitError
from .measures import entropy_from_eigenvalues, log_negativity
from .models import (
    MODEL_KINDS,
    build_fmfic_floquet,
    build_fruc_floquet,
    build_global_haar,
    evolve,
)
from .montecarlo import realization_rng
from .statevector import (
    PartitionSpec,
    StateVector,
    identity_pairing,
    prepare_initial_state,
    random_pairing,
    rho_rs,
    state_tensor_rse,
    subsystem_spectrum,
)
from .theory import as_fraction

QUANTITIES = ("negativity", "D_RS", "Delta_RS", "mutual_info", "purity_S", "purity_RS")

DEFAULT_ENSEMBLE_CAP = 2**20
DEFAULT_NEGATIVITY_DIM_CAP = 2**12
DEFAULT_STATE_BYTES_CAP = 2**32  # 4 GiB of complex amplitudes
DEFAULT_DENSE_DIM_CAP = 2**12  # largest 2^n_q we will eigendecompose


class SweepRecord(NamedTuple):
    n: int
    p: float
    tau: float
    realization: int
    quantity: str
    value: float


class CellStat(NamedTuple):
    mean: float
    se: float
    count: int


@dataclass
class SweepConfig:
    model: str
    gamma: Fraction
    n_list: tuple[int, ...]
    p_grid: tuple[Fraction, ...]
    tau_grid: tuple[Fraction, ...]
    realizations: int = 100
    master_seed: int = 0
    product_mode: str = "zero"
    quantities: tuple[str, ...] = ("negativity", "D_RS", "Delta_RS")
    s_offset: int = 0
    resample_pairing: bool = True
    fmfic_params: dict | None = None
    ensemble_cap: int = DEFAULT_ENSEMBLE_CAP
    negativity_dim_cap: int = DEFAULT_NEGATIVITY_DIM_CAP
    state_bytes_cap: int = DEFAULT_STATE_BYTES_CAP
    dense_dim_cap: int = DEFAULT_DENSE_DIM_CAP
    threads: int = 1

    def __post_init__(self):
        self.gamma = as_fraction(self.gamma)
        self.n_list = tuple(int(n) for n in self.n_list)
        self.p_grid = tuple(as_fraction(p) for p in self.p_grid)
        self.tau_grid = tuple(as_fraction(t) for t in self.tau_grid)
        quantities = []
        for q in self.quantities:
            if q == "purities":
                quantities.extend(["purity_S", "purity_RS"])
            else:
                quantities.append(q)
        self.quantities = tuple(dict.fromkeys(quantities))

    def validate(self) -> None:
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {MODEL_KINDS}")
        if not self.n_list or not self.p_grid or not self.tau_grid:
            raise ConfigError("n_list, p_grid and tau_grid must all be nonempty")
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if self.master_seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.product_mode not in ("zero", "haar_single_qubit"):
            raise ConfigError(f"unknown product_mode {self.product_mode!r}")
        unknown = set(self.quantities) - set(QUANTITIES)
        if unknown:
            raise ConfigError(f"unknown quantities: {sorted(unknown)}")
        # gamma = 0 (no R register) is allowed: fractional-size weighting
        # simulates n_R = floor(gamma N), which can be zero
        if not 0 <= self.gamma < 1:
            raise ConfigError(f"gamma must lie in [0, 1), got {self.gamma}")
        for n in self.n_list:
            if (self.gamma * n).denominator != 1:
                raise ConfigError(f"gamma*N = {self.gamma}*{n} is not an integer")
            n_r = int(self.gamma * n)
            for p in self.p_grid:
                if not 0 <= p <= 1 or (p * n).denominator != 1:
                    raise ConfigError(f"p = {p} is not a multiple of 1/{n} in [0, 1]")
                if self.s_offset + int(p * n) > n:
                    raise ConfigError(
                        f"S block (offset {self.s_offset}, size {int(p * n)}) "
                        f"does not fit in n_q = {n}"
                    )
            for tau in self.tau_grid:
                if tau < 0 or (tau * n).denominator != 1:
                    raise ConfigError(f"tau = {tau} is not a nonnegative multiple of 1/{n}")
            # resource guards, checked before any allocation
            state_bytes = 16 * 2 ** (n_r + n)
            if state_bytes > self.state_bytes_cap:
                raise ResourceLimitError(
                    f"state of {n_r + n} qubits needs {state_bytes} bytes, "
                    f"cap is {self.state_bytes_cap}"
                )
            max_ns = max(int(p * n) for p in self.p_grid)
            if {"D_RS", "Delta_RS"} & set(self.quantities) and 2**max_ns > self.ensemble_cap:
                raise ResourceLimitError(
                    f"projected ensemble needs 2^{max_ns} outcomes, cap is "
                    f"{self.ensemble_cap}"
                )
            if "negativity" in self.quantities and 2 ** (n_r + max_ns) > self.negativity_dim_cap:
                raise ResourceLimitError(
                    f"negativity needs a 2^{n_r + max_ns}-dimensional partial transpose, "
                    f"cap is {self.negativity_dim_cap}"
                )
            if self.model == "fmfic" and 2**n > self.dense_dim_cap:
                raise ResourceLimitError(
                    f"dense Floquet operator of dimension 2^{n} exceeds the cap "
                    f"{self.dense_dim_cap}"
                )

    def canonical_dict(self) -> dict:
        return {
            "model": self.model,
            "gamma": str(self.gamma),
            "n_list": list(self.n_list),
            "p_grid": [str(p) for p in self.p_grid],
            "tau_grid": [str(t) for t in self.tau_grid],
            "realizations": self.realizations,
            "seed": self.master_seed,
            "product_mode": self.product_mode,
            "quantities": list(self.quantities),
            "s_offset": self.s_offset,
            "resample_pairing": self.resample_pairing,
            "fmfic_params": self.fmfic_params,
            "ensemble_cap": self.ensemble_cap,
            "negativity_dim_cap": self.negativity_dim_cap,
            "state_bytes_cap": self.state_bytes_cap,
            "dense_dim_cap": self.dense_dim_cap,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def cells_from_records(records) -> dict[tuple, CellStat]:
    """Per-(N, p, tau, quantity) mean and standard error (stddev/sqrt(R))."""
    groups: dict[tuple, list[float]] = {}
    for rec in records:
        groups.setdefault((rec.n, rec.p, rec.tau, rec.quantity), []).append(rec.value)
    out = {}
    for key, vals in groups.items():
        arr = np.asarray(vals)
        se = float(np.std(arr, ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
        out[key] = CellStat(float(np.mean(arr)), se, len(arr))
    return out


@dataclass
class SweepResult:
    config: SweepConfig
    records: list[SweepRecord] = field(default_factory=list)

    def cells(self) -> dict[tuple, CellStat]:
        return cells_from_records(self.records)


def _cell_quantities(state: StateVector, config: SweepConfig) -> dict[str, float]:
    part = state.part
    out: dict[str, float] = {}
    spectra: dict[str, np.ndarray] = {}

    def spec_of(region: str) -> np.ndarray:
        if region not in spectra:
            keep = {"R": part.r_keep, "S": part.s_keep, "RS": part.rs_keep}[region]()
            spectra[region] = subsystem_spectrum(state, keep)
        return spectra[region]

    wanted = set(config.quantities)
    if "negativity" in wanted:
        out["negativity"] = log_negativity(rho_rs(state))
    if {"D_RS", "Delta_RS"} & wanted:
        ens = ensemble_from_state(state, config.ensemble_cap)
        if "D_RS" in wanted:
            out["D_RS"] = ensemble_D_RS(ens)
        if "Delta_RS" in wanted:
            out["Delta_RS"] = ensemble_Delta_RS(ens)
    if "mutual_info" in wanted:
        out["mutual_info"] = (
            entropy_from_eigenvalues(spec_of("R"))
            + entropy_from_eigenvalues(spec_of("S"))
            - entropy_from_eigenvalues(spec_of("RS"))
        )
    if "purity_S" in wanted:
        out["purity_S"] = float(np.sum(spec_of("S") ** 2))
    if "purity_RS" in wanted:
        out["purity_RS"] = float(np.sum(spec_of("RS") ** 2))
    return out


def _realization_records(
    config: SweepConfig, n: int, realization: int, prebuilt=None
) -> list[SweepRecord]:
    n_r = int(config.gamma * n)
    rng = realization_rng(config.master_seed, realization)
    pairing = (
        random_pairing(n, n_r, rng) if config.resample_pairing else identity_pairing(n_r)
    )
    part0 = PartitionSpec(n_q=n, n_r=n_r, s_indices=(), pairing=pairing)
    state = prepare_initial_state(part0, config.product_mode, rng)
    if config.model == "fruc":
        op = build_fruc_floquet(n, rng)
    elif config.model == "global_haar":
        op = build_global_haar(n, rng)
    else:
        op = prebuilt
    records = []
    cur_t = 0
    for tau in sorted(config.tau_grid):
        t = int(tau * n)
        if t > cur_t:
            if op.kind == "global_haar":
                if cur_t == 0:
                    state = evolve(state, op, 1)
            else:
                state = evolve(state, op, t - cur_t)
            cur_t = t
        for p in sorted(config.p_grid):
            part_p = part0.with_s_block(int(p * n), config.s_offset)
            values = _cell_quantities(StateVector(state.amplitudes, part_p), config)
            for quantity, value in values.items():
                records.append(
                    SweepRecord(n, float(p), float(tau), realization, quantity, value)
                )
    return records


def run_sweep(config: SweepConfig) -> SweepResult:
    """Deterministic sweep: realization r always uses the RNG stream keyed by
    master_seed ^ r, so results are bit-identical for a fixed config
    regardless of thread count."""
    config.validate()
    prebuilt = {}
    if config.model == "fmfic":
        for n in config.n_list:
            prebuilt[n] = build_fmfic_floquet(n, config.fmfic_params)
    tasks = [(n, r) for n in config.n_list for r in range(config.realizations)]
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            chunks = list(
                pool.map(
                    lambda nr: _realization_records(config, nr[0], nr[1], prebuilt.get(nr[0])),
                    tasks,
                )
            )
    else:
        chunks = [_realization_records(config, n, r, prebuilt.get(n)) for n, r in tasks]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r.n, r.p, r.tau, r.realization, r.quantity))
    return SweepResult(config, records)


def weighted_size_average(
    result_floor: SweepResult, result_hi: SweepResult, gamma_target
) -> dict[tuple, CellStat]:
    """Combine two single-Q-size runs at n_R = floor(gamma N) and
    ceil(gamma N) with weights chosen so the effective total size is
    (1+gamma)N."""
    gamma_target = as_fraction(gamma_target)
    lo_cfg, hi_cfg = result_floor.config, result_hi.config
    if lo_cfg.n_list != hi_cfg.n_list or len(lo_cfg.n_list) != 1:
        raise ValueError("weighted_size_average expects two runs at one common N")
    n = lo_cfg.n_list[0]
    frac = gamma_target * n - int(gamma_target * n)
    lo_cells, hi_cells = result_floor.cells(), result_hi.cells()
    if frac == 0:
        return lo_cells
    if int(lo_cfg.gamma * n) != int(gamma_target * n) or int(hi_cfg.gamma * n) != int(
        gamma_target * n
    ) + 1:
        raise ValueError(
            "inputs must simulate n_R = floor(gamma N) and floor(gamma N) + 1"
        )
    if set(lo_cells) != set(hi_cells):
        raise ValueError("the two runs do not share a (p, tau) grid")
    eta_hi = float(frac)
    eta_lo = 1.0 - eta_hi
    out = {}
    for key, lo in lo_cells.items():
        hi = hi_cells[key]
        mean = eta_hi * hi.mean + eta_lo * lo.mean
        se = float(np.hypot(eta_hi * hi.se, eta_lo * lo.se))
        out[key] = CellStat(mean, se, min(lo.count, hi.count))
    return out


@dataclass
class Surface:
    """Bilinear interpolant of per-cell means (and standard errors) on the
    rectangular (p, tau) grid of one system size."""

    p_vals: np.ndarray
    tau_vals: np.ndarray
    means: np.ndarray  # shape (len(p_vals), len(tau_vals))
    ses: np.ndarray

    def _locate(self, vals: np.ndarray, x: float) -> tuple[int, float]:
        if x < vals[0] - 1e-9 or x > vals[-1] + 1e-9:
            raise ValueError(f"query {x} outside grid hull [{vals[0]}, {vals[-1]}]")
        if len(vals) == 1:
            return 0, 0.0
        i = int(np.clip(np.searchsorted(vals, x, side="right") - 1, 0, len(vals) - 2))
        return i, (x - vals[i]) / (vals[i + 1] - vals[i])

    def _interp(self, grid: np.ndarray, p: float, tau: float) -> float:
        i, wp = self._locate(self.p_vals, p)
        j, wt = self._locate(self.tau_vals, tau)
        if len(self.p_vals) == 1:
            row0 = row1 = grid[i]
        else:
            row0, row1 = grid[i], grid[i + 1]
        if len(self.tau_vals) == 1:
            v0, v1 = row0[j], row1[j]
        else:
            v0 = (1 - wt) * row0[j] + wt * row0[j + 1]
            v1 = (1 - wt) * row1[j] + wt * row1[j + 1]
        return float((1 - wp) * v0 + wp * v1)

    def value(self, p: float, tau: float) -> float:
        return self._interp(self.means, p, tau)

    def stderr(self, p: float, tau: float) -> float:
        return self._interp(self.ses, p, tau)


def interpolate_surface(cells: Mapping[tuple, CellStat], n: int, quantity: str) -> Surface:
    sel = {
        (p, tau): stat for (nn, p, tau, q), stat in cells.items() if nn == n and q == quantity
    }
    if not sel:
        raise ValueError(f"no cells for N={n}, quantity={quantity!r}")
    p_vals = np.array(sorted({p for p, _ in sel}))
    tau_vals = np.array(sorted({t for _, t in sel}))
    means = np.empty((len(p_vals), len(tau_vals)))
    ses = np.empty_like(means)
    for i, p in enumerate(p_vals):
        for j, t in enumerate(tau_vals):
            if (p, t) not in sel:
                raise ValueError(f"grid for N={n} is missing the cell (p={p}, tau={t})")
            means[i, j], ses[i, j] = sel[(p, t)].mean, sel[(p, t)].se
    return Surface(p_vals, tau_vals, means, ses)


@dataclass
class CriticalEstimate:
    quantity: str
    direction: str  # scanned axis: "p" or "tau"
    coordinate: float  # value of the fixed axis
    value: float
    lower_err: float
    upper_err: float
    flag: str

    def __post_init__(self):
        if self.flag == "ok" and not (
            self.lower_err - 1e-12 <= self.value <= self.upper_err + 1e-12
        ):
            raise ValueError(
                f"error bars [{self.lower_err}, {self.upper_err}] do not bracket "
                f"{self.value}"
            )


def _lsq_slope(xs: np.ndarray, ys: np.ndarray) -> float:
    return float(np.polyfit(xs, ys, 1)[0])


def _monotone_beyond_se(vals, ses, direction: int, se_factor: float) -> bool:
    for a, b, sa, sb in zip(vals[:-1], vals[1:], ses[:-1], ses[1:]):
        gap = np.hypot(sa, sb) * se_factor
        if direction > 0 and not b - a > gap:
            return False
        if direction < 0 and not a - b > gap:
            return False
    return True


def estimate_critical_line(
    surfaces: Mapping[int, Surface],
    quantity: str,
    scan_direction: str,
    n_scan: int = 201,
    eps: float = 1e-12,
    slope_tol: float = 1e-12,
    se_factor: float = 1.0,
) -> list[CriticalEstimate]:
    """For each fixed coordinate on the other axis, scan the requested axis,
    fit the trend of f_N against N at every scan point (log-values when all
    positive, since the order parameters move exponentially in N), and
    report the point separating the decaying-trend region from the growing
    one.  Error bars extend to the nearest scan points whose f_N sequences
    are strictly monotone beyond one combined standard error."""
    if scan_direction not in ("p", "tau"):
        raise ValueError("scan_direction must be 'p' or 'tau'")
    ns = sorted(surfaces)
    if len(ns) < 3:
        raise ValueError(f"need >= 3 sizes, got {len(ns)}")
    n_arr = np.array(ns, dtype=float)

    def fixed_axis(s: Surface):
        return s.tau_vals if scan_direction == "p" else s.p_vals

    def scan_axis(s: Surface):
        return s.p_vals if scan_direction == "p" else s.tau_vals

    common_fixed = set(np.round(fixed_axis(surfaces[ns[0]]), 10))
    for n in ns[1:]:
        common_fixed &= set(np.round(fixed_axis(surfaces[n]), 10))

    estimates = []
    for c in sorted(common_fixed):
        lo = max(scan_axis(surfaces[n])[0] for n in ns)
        hi = min(scan_axis(surfaces[n])[-1] for n in ns)
        if not lo < hi:
            continue
        xs = np.linspace(lo, hi, n_scan)
        vals = np.empty((len(ns), n_scan))
        ses = np.empty_like(vals)
        for k, n in enumerate(ns):
            for i, x in enumerate(xs):
                p, tau = (x, c) if scan_direction == "p" else (c, x)
                vals[k, i] = surfaces[n].value(p, tau)
                ses[k, i] = surfaces[n].stderr(p, tau)
        slopes = np.empty(n_scan)
        for i in range(n_scan):
            col = vals[:, i]
            ys = np.log(col + eps) if np.all(col > 0) else col
            slopes[i] = _lsq_slope(n_arr, ys)
        signs = np.where(slopes > slope_tol, 1, np.where(slopes < -slope_tol, -1, 0))

        def emit(value, lo_err, hi_err, flag):
            estimates.append(
                CriticalEstimate(quantity, scan_direction, float(c), value, lo_err, hi_err, flag)
            )

        if not (signs > 0).any() and not (signs < 0).any():
            emit(float("nan"), float("nan"), float("nan"), "no_transition")
            continue
        if not (signs > 0).any():
            emit(float(hi), float(hi), float(hi), "one_sided_above")
            continue
        if not (signs < 0).any():
            emit(float(lo), float(lo), float(lo), "one_sided_below")
            continue

        # separating point: minimise misclassified trend signs on both sides
        pos_prefix = np.concatenate([[0], np.cumsum(signs > 0)])
        neg_prefix = np.concatenate([[0], np.cumsum(signs < 0)])
        splits = np.arange(-1, n_scan - 1)
        cost_np = pos_prefix[splits + 1] + (neg_prefix[-1] - neg_prefix[splits + 1])
        cost_pn = neg_prefix[splits + 1] + (pos_prefix[-1] - pos_prefix[splits + 1])
        orientation = 1 if cost_np.min() <= cost_pn.min() else -1
        cost = cost_np if orientation > 0 else cost_pn
        argmins = np.flatnonzero(cost == cost.min())
        i_star = int(splits[argmins[len(argmins) // 2]])
        if i_star < 0:
            emit(float(lo), float(lo), float(lo), "one_sided_below")
            continue
        if i_star >= n_scan - 1:
            emit(float(hi), float(hi), float(hi), "one_sided_above")
            continue
        s0, s1 = slopes[i_star], slopes[i_star + 1]
        if s0 != s1 and np.sign(s0) != np.sign(s1):
            value = float(xs[i_star] - s0 * (xs[i_star + 1] - xs[i_star]) / (s1 - s0))
        else:
            value = float(0.5 * (xs[i_star] + xs[i_star + 1]))

        below_dir = -orientation  # trend on the low side of the crossing
        lower_err = float(lo)
        for i in range(i_star, -1, -1):
            if xs[i] > value:
                continue
            if _monotone_beyond_se(vals[:, i], ses[:, i], below_dir, se_factor):
                lower_err = float(xs[i])
                break
        upper_err = float(hi)
        for i in range(i_star + 1, n_scan):
            if xs[i] < value:
                continue
            if _monotone_beyond_se(vals[:, i], ses[:, i], orientation, se_factor):
                upper_err = float(xs[i])
                break
        emit(value, min(lower_err, value), max(upper_err, value), "ok")
    return estimates


@dataclass
class SelfAveragingRecord:
    n: int
    chi1: float
    chi2: float
    excluded_outcomes: int


def self_averaging_chi(
    n_list,
    realizations: int,
    p,
    gamma,
    master_seed: int = 0,
    product_mode: str = "zero",
) -> list[SelfAveragingRecord]:
    """Relative quenched/annealed gap of Tr[rho~_R(o_S)^2] (chi1) and
    p(o_S)^2 (chi2), averaged over all outcomes, per system size.  Outcomes
    that ever carry zero weight cannot enter the logarithms and are counted
    as excluded."""
    p = as_fraction(p)
    gamma = as_fraction(gamma)
    out = []
    for n in n_list:
        if (p * n).denominator != 1 or (gamma * n).denominator != 1:
            raise ValueError(f"p*N and gamma*N must be integers at N={n}")
        n_r, n_s = int(gamma * n), int(p * n)
        d_s = 2**n_s
        sum_x = np.zeros((2, d_s))
        sum_lnx = np.zeros((2, d_s))
        zero_hits = np.zeros(d_s, dtype=int)
        for r in range(realizations):
            rng = realization_rng(master_seed, r)
            pairing = random_pairing(n, n_r, rng)
            part = PartitionSpec(n_q=n, n_r=n_r, s_indices=tuple(range(n_s)), pairing=pairing)
            state = prepare_initial_state(part, product_mode, rng)
            state = evolve(state, build_global_haar(n, rng), 1)
            t = state_tensor_rse(state)
            sub = np.einsum("rse,qse->srq", t, t.conj())
            probs = np.einsum("srr->s", sub).real
            trsq = np.einsum("srq,sqr->s", sub, sub).real
            x = np.stack([trsq, probs**2])
            good = np.all(x > 0, axis=0)
            zero_hits += ~good
            sum_x[:, good] += x[:, good]
            sum_lnx[:, good] += np.log(x[:, good])
        valid = zero_hits == 0
        excluded = int(np.sum(~valid))
        chis = []
        for k in range(2):
            mean_x = sum_x[k, valid] / realizations
            mean_lnx = sum_lnx[k, valid] / realizations
            v = np.abs((np.log(mean_x) - mean_lnx) / mean_lnx)
            chis.append(float(np.sum(v) / d_s))
        out.append(SelfAveragingRecord(n, chis[0], chis[1], excluded))
    return out
