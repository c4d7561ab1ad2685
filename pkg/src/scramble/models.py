"""Time-evolution generators acting on the Q register: brickwork Floquet
circuits of Haar-random two-qubit gates, the Floquet mixed-field Ising
chain, and a single global Haar unitary for the infinite-depth limit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import StateVector, apply_two_qubit_gate

# Mixed-field Ising parameters at which the chain is strongly chaotic.
CHAOTIC_FMFIC = {"h_x": 0.809, "h_y": 0.9045, "j": 1.0, "delta": 0.5}

MODEL_KINDS = ("fruc", "fmfic", "global_haar")


def sample_haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex standard-Gaussian matrix
    with the R-factor's diagonal phases folded into Q."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class FloquetOperator:
    """One period of evolution.  ``gates`` lists (site, 4x4 unitary) pairs
    applied in order for brickwork circuits; ``dense`` is the full
    2^n_q-dimensional period unitary for fmfic and global_haar."""

    kind: str
    n_q: int
    gates: tuple[tuple[int, np.ndarray], ...] | None = None
    dense: np.ndarray | None = None
    period_depth: int = 1


def _verify_dense_unitary(u: np.ndarray, tol: float) -> None:
    d = u.shape[0]
    if d <= 1024:
        err = np.max(np.abs(u.conj().T @ u - np.eye(d)))
    else:
        # full check is O(d^3); spot-check columns instead
        rng = np.random.default_rng(0)
        x = rng.normal(size=(d, 8)) + 1j * rng.normal(size=(d, 8))
        x /= np.linalg.norm(x, axis=0)
        err = np.max(np.abs(np.linalg.norm(u @ x, axis=0) - 1.0))
    if err > tol:
        raise ValueError(f"period operator is not unitary (deviation {err:.3e})")


def build_fruc_floquet(n_q: int, rng: np.random.Generator) -> FloquetOperator:
    """Brickwork period: fresh Haar gates on all odd bonds (0,1),(2,3),...
    then all even bonds (1,2),...,(n_q-1,0) with periodic wraparound.
    Gates are sampled once and reused every period."""
    if n_q % 2 != 0:
        raise ValueError(f"brickwork circuit needs even n_q, got {n_q}")
    sites = list(range(0, n_q, 2)) + list(range(1, n_q, 2))
    gates = tuple((s, sample_haar_unitary(4, rng)) for s in sites)
    return FloquetOperator(kind="fruc", n_q=n_q, gates=gates, period_depth=2)


def _mixed_field_ising(n_q: int, h_x: float, h_y: float, j: float) -> np.ndarray:
    """Dense H = sum_i [h_x X_i + h_y Y_i + j X_i X_{i+1}] with periodic
    boundary; site i is bit i of the Q-local index."""
    d = 2**n_q
    h = np.zeros((d, d), dtype=complex)
    cols = np.arange(d)
    for i in range(n_q):
        mask = 1 << i
        flipped = cols ^ mask
        h[flipped, cols] += h_x
        bit = (cols >> i) & 1
        h[flipped, cols] += 1j * h_y * (1 - 2 * bit)
        mask2 = 1 << ((i + 1) % n_q)
        h[cols ^ mask ^ mask2, cols] += j
    return h


# the dense period operator is deterministic and expensive at large n_q;
# keep the two most recent builds (sweeps alternate quantity grids per size)
_FMFIC_CACHE: dict[tuple, FloquetOperator] = {}


def build_fmfic_floquet(n_q: int, params: dict | None = None) -> FloquetOperator:
    """Period unitary exp(-i H_+) exp(-i H_-) of the mixed-field Ising chain,
    built by exact dense eigendecomposition (no Trotterisation)."""
    if n_q < 2:
        raise ValueError(f"the Ising chain needs n_q >= 2, got {n_q}")
    p = dict(CHAOTIC_FMFIC)
    if params:
        unknown = set(params) - set(p)
        if unknown:
            raise ValueError(f"unknown fmfic parameters: {sorted(unknown)}")
        p.update(params)
    key = (n_q, tuple(sorted(p.items())))
    if key in _FMFIC_CACHE:
        return _FMFIC_CACHE[key]
    u = np.eye(2**n_q, dtype=complex)
    for sign in (+1, -1):
        h = _mixed_field_ising(n_q, p["h_x"] * (1 + sign * p["delta"]), p["h_y"], p["j"])
        w, v = np.linalg.eigh(h)
        u = u @ (v * np.exp(-1j * w)) @ v.conj().T
    _verify_dense_unitary(u, 1e-9)
    op = FloquetOperator(kind="fmfic", n_q=n_q, dense=u, period_depth=2)
    while len(_FMFIC_CACHE) >= 2:
        _FMFIC_CACHE.pop(next(iter(_FMFIC_CACHE)))
    _FMFIC_CACHE[key] = op
    return op


def build_global_haar(n_q: int, rng: np.random.Generator) -> FloquetOperator:
    """A single Haar unitary on all of Q, representing the infinite-depth
    limit; evolve() applies it exactly once."""
    return FloquetOperator(
        kind="global_haar", n_q=n_q, dense=sample_haar_unitary(2**n_q, rng)
    )


def _apply_dense(state: StateVector, u: np.ndarray) -> StateVector:
    # unitarity was verified at build time; skip the O(d^3) recheck here
    part = state.part
    m = state.amplitudes.reshape(2**part.n_q, part.dim_r)
    return StateVector(np.ascontiguousarray(u @ m).reshape(-1), part)


def evolve(state: StateVector, op: FloquetOperator, t_steps: int) -> StateVector:
    """Apply the period operator t_steps times.  For global_haar the dense
    unitary is applied exactly once for any t_steps >= 1: the infinite-depth
    limit is a single draw, repeated application has no meaning."""
    if t_steps < 0:
        raise ValueError(f"t_steps must be >= 0, got {t_steps}")
    if op.n_q != state.part.n_q:
        raise ValueError(f"operator built for n_q={op.n_q}, state has {state.part.n_q}")
    if t_steps == 0:
        return state
    if op.kind == "fruc":
        for _ in range(t_steps):
            for site, gate in op.gates:
                state = apply_two_qubit_gate(state, gate, site)
        return state
    if op.kind == "fmfic":
        for _ in range(t_steps):
            state = _apply_dense(state, op.dense)
        return state
    if op.kind == "global_haar":
        return _apply_dense(state, op.dense)
    raise ValueError(f"unknown operator kind: {op.kind!r}")
