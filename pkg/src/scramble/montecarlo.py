"""Monte-Carlo sampling of global-Haar realizations, used as the empirical
side of every closed-form comparison."""

from __future__ import annotations

import numpy as np

from .ensemble import build_projected_ensemble, ensemble_D_RS, ensemble_Delta_RS
from .measures import (
    entropy_from_eigenvalues,
    log_negativity,
    mutual_information,
    trace_norm,
)
from .models import build_global_haar, evolve
from .statevector import (
    PartitionSpec,
    identity_pairing,
    prepare_initial_state,
    random_pairing,
    rho_rs,
    state_tensor_rse,
    subsystem_spectrum,
)
from .theory import TheoryParams

OBSERVABLES = (
    "purity_S",
    "purity_RS",
    "prob_sq",
    "cond_weight_sq",
    "D_RS",
    "Delta_RS",
    "mutual_info",
    "trace_dist_maxmix",
    "negativity",
)


def realization_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream per realization."""
    return np.random.Generator(np.random.Philox(key=master_seed ^ index))


def sample_haar_observables(
    params: TheoryParams,
    n_samples: int,
    master_seed: int = 0,
    want: tuple[str, ...] = ("purity_S", "purity_RS", "prob_sq", "cond_weight_sq"),
    product_mode: str = "zero",
    resample_pairing: bool = True,
    dm_hook=None,
    ensemble_hook=None,
) -> dict[str, np.ndarray]:
    """Evolve fresh Bell-seeded states by fresh Haar unitaries and record the
    requested observables.  prob_sq and cond_weight_sq use the fixed all-zero
    outcome; the Haar average is outcome independent.

    ``dm_hook`` / ``ensemble_hook`` receive every reduced density matrix and
    projected ensemble this routine builds; property suites attach here."""
    unknown = set(want) - set(OBSERVABLES)
    if unknown:
        raise ValueError(f"unknown observables: {sorted(unknown)}")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n, n_r, n_s = params.n, params.n_r, params.n_s
    out = {name: np.empty(n_samples) for name in want}
    need_ensemble = {"D_RS", "Delta_RS"} & set(want)
    need_rho_rs = need_ensemble or {"mutual_info", "trace_dist_maxmix", "negativity"} & set(want)
    for i in range(n_samples):
        rng = realization_rng(master_seed, i)
        pairing = random_pairing(n, n_r, rng) if resample_pairing else identity_pairing(n_r)
        part = PartitionSpec(n_q=n, n_r=n_r, s_indices=tuple(range(n_s)), pairing=pairing)
        state = prepare_initial_state(part, product_mode, rng)
        state = evolve(state, build_global_haar(n, rng), 1)
        if "purity_S" in want:
            w = subsystem_spectrum(state, part.s_keep())
            out["purity_S"][i] = float(np.sum(w**2))
        if "purity_RS" in want:
            w = subsystem_spectrum(state, part.rs_keep())
            out["purity_RS"][i] = float(np.sum(w**2))
        if "prob_sq" in want or "cond_weight_sq" in want:
            t = state_tensor_rse(state)
            m = t[:, 0, :]
            sub = m @ m.conj().T
            if "prob_sq" in want:
                out["prob_sq"][i] = float(np.trace(sub).real) ** 2
            if "cond_weight_sq" in want:
                out["cond_weight_sq"][i] = float(np.sum(np.abs(sub) ** 2))
        if need_rho_rs:
            rho = rho_rs(state)
            if dm_hook is not None:
                dm_hook(rho)
            if need_ensemble:
                ens = build_projected_ensemble(rho, part)
                if ensemble_hook is not None:
                    ensemble_hook(ens)
                if "D_RS" in want:
                    out["D_RS"][i] = ensemble_D_RS(ens)
                if "Delta_RS" in want:
                    out["Delta_RS"][i] = ensemble_Delta_RS(ens)
            if "mutual_info" in want:
                out["mutual_info"][i] = mutual_information(rho)
            if "trace_dist_maxmix" in want:
                d = rho.dim
                out["trace_dist_maxmix"][i] = trace_norm(rho.matrix - np.eye(d) / d)
            if "negativity" in want:
                out["negativity"][i] = log_negativity(rho)
    return out


def mean_se(samples: np.ndarray) -> tuple[float, float]:
    """Sample mean and its standard error (ddof=1; zero for a single sample)."""
    m = float(np.mean(samples))
    if len(samples) < 2:
        return m, 0.0
    return m, float(np.std(samples, ddof=1) / np.sqrt(len(samples)))


def entropy_of_spectrum(w: np.ndarray) -> float:
    return entropy_from_eigenvalues(np.asarray(w))
