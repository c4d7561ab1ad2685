"""Projected ensembles: conditional states of R under exhaustive
computational-basis measurement of S, and the visibility measures built
from them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError
from .measures import DensityMatrix, relative_entropy, trace_distance
from .statevector import (
    P_FLOOR,
    PartitionSpec,
    StateVector,
    outcome_string,
    project_outcome,
    state_tensor_rse,
)

ENSEMBLE_CAP = 2**20


@dataclass
class EnsembleEntry:
    outcome: str
    probability: float
    conditional: DensityMatrix | None  # None when probability <= P_FLOOR


@dataclass
class ProjectedEnsemble:
    entries: list[EnsembleEntry]
    reference: DensityMatrix  # rho_R, the ensemble's first moment

    def total_probability(self) -> float:
        return sum(e.probability for e in self.entries)

    def first_moment(self) -> np.ndarray:
        d = self.reference.dim
        acc = np.zeros((d, d), dtype=complex)
        for e in self.entries:
            if e.conditional is not None:
                acc += e.probability * e.conditional.matrix
        return acc


def _check_cap(n_s: int, cap: int) -> None:
    if 2**n_s > cap:
        raise ResourceLimitError(
            f"enumerating 2^{n_s} measurement outcomes exceeds the cap {cap}; "
            "outcome sampling is not provided - reduce |S| or raise the cap"
        )


def build_projected_ensemble(
    rho_rs: DensityMatrix, part: PartitionSpec, cap: int = ENSEMBLE_CAP
) -> ProjectedEnsemble:
    """One entry per outcome bitstring over S, built by exhaustive projection."""
    _check_cap(part.n_s, cap)
    d_r, d_s = part.dim_r, part.dim_s
    if rho_rs.factor_dims != (d_r, d_s):
        raise ValueError(
            f"density matrix factors {rho_rs.factor_dims} do not match partition"
        )
    entries = []
    for o in range(d_s):
        bits = outcome_string(o, part)
        prob, cond = project_outcome(rho_rs, part, bits)
        entries.append(EnsembleEntry(bits, prob, cond))
    blocks = rho_rs.matrix.reshape(d_r, d_s, d_r, d_s)
    reference = DensityMatrix(np.einsum("isjs->ij", blocks), (d_r,))
    return ProjectedEnsemble(entries, reference)


def ensemble_from_state(state: StateVector, cap: int = ENSEMBLE_CAP) -> ProjectedEnsemble:
    """Same ensemble as build_projected_ensemble(rho_rs(state), ...) but
    assembled straight from the amplitudes; avoids forming rho_RS, which is
    what makes large-|S| sweeps affordable."""
    part = state.part
    _check_cap(part.n_s, cap)
    t = state_tensor_rse(state)
    sub = np.einsum("rse,qse->srq", t, t.conj())
    probs = np.einsum("srr->s", sub).real
    entries = []
    for o in range(part.dim_s):
        bits = outcome_string(o, part)
        prob = float(probs[o])
        if prob <= P_FLOOR:
            entries.append(EnsembleEntry(bits, prob, None))
        else:
            entries.append(
                EnsembleEntry(bits, prob, DensityMatrix(sub[o] / prob, (part.dim_r,)))
            )
    reference = DensityMatrix(sub.sum(axis=0), (part.dim_r,))
    return ProjectedEnsemble(entries, reference)


def ensemble_D_RS(ens: ProjectedEnsemble) -> float:
    """Probability-weighted relative entropy of conditionals to the mean
    state; unreachable outcomes contribute exactly 0."""
    total = 0.0
    for e in ens.entries:
        if e.conditional is None:
            continue
        total += e.probability * relative_entropy(e.conditional, ens.reference)
    return total


def ensemble_Delta_RS(ens: ProjectedEnsemble) -> float:
    """Probability-weighted halved trace distance of conditionals to the
    mean state; lies in [0, 1]."""
    total = 0.0
    for e in ens.entries:
        if e.conditional is None:
            continue
        total += e.probability * trace_distance(e.conditional, ens.reference)
    return total


def _eigenspace_projectors(obs: np.ndarray, tol: float = 1e-8):
    """Projector per distinct eigenvalue (degenerate spaces summed)."""
    w, v = np.linalg.eigh(obs)
    projs = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[start] > tol:
            block = v[:, start:i]
            projs.append((float(np.mean(w[start:i])), block @ block.conj().T))
            start = i
    return projs


def factorization_gap(
    rho_rs: DensityMatrix, obs_r: np.ndarray, obs_s: np.ndarray
) -> float:
    """Largest deviation |P(a_R, a_S) - P(a_R) P(a_S)| over joint eigenvalue
    outcomes of observables on R and on S."""
    if rho_rs.n_factors != 2:
        raise ValueError("factorization_gap needs an (R, S) factorisation")
    d_r, d_s = rho_rs.factor_dims
    obs_r = np.asarray(obs_r)
    obs_s = np.asarray(obs_s)
    if obs_r.shape != (d_r, d_r) or obs_s.shape != (d_s, d_s):
        raise ValueError(
            f"observable shapes {obs_r.shape}, {obs_s.shape} do not match factors "
            f"({d_r}, {d_s})"
        )
    for name, o in (("obs_r", obs_r), ("obs_s", obs_s)):
        if np.max(np.abs(o - o.conj().T)) > 1e-9:
            raise ValueError(f"{name} must be Hermitian")
    t = rho_rs.matrix.reshape(d_r, d_s, d_r, d_s)
    pr = _eigenspace_projectors(obs_r)
    ps = _eigenspace_projectors(obs_s)
    joint = np.empty((len(pr), len(ps)))
    for i, (_, p_a) in enumerate(pr):
        for j, (_, p_b) in enumerate(ps):
            # Tr[(P_a x P_b) rho] with rho[(r,s),(r',s')] = t[r,s,r',s']
            joint[i, j] = np.einsum("rq,su,qurs->", p_a, p_b, t).real
    marg_r = joint.sum(axis=1)
    marg_s = joint.sum(axis=0)
    return float(np.max(np.abs(joint - np.outer(marg_r, marg_s))))
