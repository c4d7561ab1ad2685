"""Dense state vectors for the R + Q qubit register.

Bit convention used throughout the package: the register holds
``n_r + n_q`` qubits; global qubit ``g`` is bit ``g`` of the flat amplitude
index (qubit 0 = least significant bit).  R qubits occupy positions
``0 .. n_r-1``, Q qubit ``j`` sits at ``n_r + j``.  Operators acting on the
Q slice use the Q-local integer with Q qubit 0 at the least significant
bit, so ``np.kron(A, B)`` places ``B`` on the lower-indexed site.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import PartitionError
from .measures import DensityMatrix

# Probability below which a measurement outcome is treated as unreachable
# (avoids 0/0 when normalising conditional states).
P_FLOOR = 1e-14

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
# control = first (high) gate bit, target = second
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


@dataclass(frozen=True)
class PartitionSpec:
    """Sizes and index sets of R, S, E inside the register.

    ``s_indices`` are Q-local indices (0-based); their list order defines the
    bit order of measurement-outcome strings: character ``k`` of an outcome
    refers to ``s_indices[k]`` and is bit ``k`` of the S-block integer.
    ``pairing`` maps each R qubit (by R-local index) to a distinct Q qubit.
    """

    n_q: int
    n_r: int
    s_indices: tuple[int, ...]
    pairing: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if self.n_q < 1:
            raise PartitionError(f"n_q must be >= 1, got {self.n_q}")
        if not 0 <= self.n_r <= self.n_q:
            raise PartitionError(f"n_r must lie in [0, n_q], got {self.n_r}")
        s = tuple(self.s_indices)
        if len(set(s)) != len(s):
            raise PartitionError(f"duplicate S indices: {s}")
        if any(not 0 <= i < self.n_q for i in s):
            raise PartitionError(f"S indices out of range for n_q={self.n_q}: {s}")
        pairs = tuple(self.pairing)
        if len(pairs) != self.n_r:
            raise PartitionError(
                f"pairing must cover all {self.n_r} R qubits, got {len(pairs)} pairs"
            )
        r_side = [r for r, _ in pairs]
        q_side = [q for _, q in pairs]
        if sorted(r_side) != list(range(self.n_r)) or len(set(q_side)) != len(q_side):
            raise PartitionError(f"pairing is not injective R -> Q: {pairs}")
        if any(not 0 <= q < self.n_q for q in q_side):
            raise PartitionError(f"pairing targets out of range: {pairs}")

    # -- derived sizes ----------------------------------------------------
    @property
    def n_s(self) -> int:
        return len(self.s_indices)

    @property
    def n_e(self) -> int:
        return self.n_q - self.n_s

    @property
    def n_total(self) -> int:
        return self.n_r + self.n_q

    @property
    def e_indices(self) -> tuple[int, ...]:
        in_s = set(self.s_indices)
        return tuple(i for i in range(self.n_q) if i not in in_s)

    @property
    def gamma(self) -> float:
        return self.n_r / self.n_q

    @property
    def p(self) -> float:
        return self.n_s / self.n_q

    @property
    def dim_r(self) -> int:
        return 2**self.n_r

    @property
    def dim_s(self) -> int:
        return 2**self.n_s

    @property
    def dim_e(self) -> int:
        return 2**self.n_e

    # -- keep lists (most-significant qubit first) ------------------------
    def r_keep(self) -> list[int]:
        return list(range(self.n_r - 1, -1, -1))

    def s_keep(self) -> list[int]:
        return [self.n_r + j for j in reversed(self.s_indices)]

    def e_keep(self) -> list[int]:
        return [self.n_r + j for j in reversed(self.e_indices)]

    def rs_keep(self) -> list[int]:
        return self.r_keep() + self.s_keep()

    def with_s_block(self, size: int, offset: int = 0) -> "PartitionSpec":
        """Same partition with S set to the contiguous block [offset, offset+size)."""
        if not 0 <= size <= self.n_q or offset < 0 or offset + size > self.n_q:
            raise PartitionError(
                f"S block [{offset}, {offset + size}) does not fit in n_q={self.n_q}"
            )
        return replace(self, s_indices=tuple(range(offset, offset + size)))


def random_pairing(n_q: int, n_r: int, rng: np.random.Generator) -> tuple[tuple[int, int], ...]:
    """Pair each R qubit with a distinct, uniformly chosen Q qubit."""
    targets = rng.permutation(n_q)[:n_r]
    return tuple((k, int(targets[k])) for k in range(n_r))


def identity_pairing(n_r: int) -> tuple[tuple[int, int], ...]:
    return tuple((k, k) for k in range(n_r))


@dataclass
class StateVector:
    """Pure state of the full register as a flat complex amplitude array."""

    amplitudes: np.ndarray
    part: PartitionSpec

    def __post_init__(self):
        n = self.part.n_total
        if self.amplitudes.shape != (2**n,):
            raise ValueError(
                f"amplitude array has shape {self.amplitudes.shape}, expected ({2**n},)"
            )

    @property
    def n_total(self) -> int:
        return self.part.n_total

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _check_unitary(u: np.ndarray, tol: float = 1e-10) -> None:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"operator must be square, got shape {u.shape}")
    d = u.shape[0]
    err = np.max(np.abs(u.conj().T @ u - np.eye(d)))
    if err > tol:
        raise ValueError(f"operator is not unitary (max |U^H U - I| = {err:.3e})")


def _apply_gate(amps: np.ndarray, n: int, gate: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Apply a k-qubit gate; ``qubits`` are listed most-significant-first
    with respect to the gate's index convention."""
    k = len(qubits)
    axes = [n - 1 - q for q in qubits]
    t = amps.reshape([2] * n)
    g = gate.reshape([2] * (2 * k))
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), axes))
    t = np.moveaxis(t, list(range(k)), axes)
    return np.ascontiguousarray(t).reshape(-1)


def prepare_initial_state(
    part: PartitionSpec,
    product_mode: str = "zero",
    rng_seed: int | np.random.Generator = 0,
) -> StateVector:
    """Bell pairs across the pairing; unpaired Q qubits in |0> or in
    independent uniformly random single-qubit states."""
    if product_mode not in ("zero", "haar_single_qubit"):
        raise ValueError(f"unknown product_mode: {product_mode!r}")
    rng = (
        rng_seed
        if isinstance(rng_seed, np.random.Generator)
        else np.random.Generator(np.random.Philox(key=rng_seed))
    )
    n = part.n_total
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    for r, q in sorted(part.pairing):
        amps = _apply_gate(amps, n, _HADAMARD, [r])
        amps = _apply_gate(amps, n, _CNOT, [r, part.n_r + q])
    if product_mode == "haar_single_qubit":
        paired = {q for _, q in part.pairing}
        for q in range(part.n_q):
            if q in paired:
                continue
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            v /= np.linalg.norm(v)
            # unitary with the sampled state as first column: |0> -> v
            u = np.array([[v[0], -np.conj(v[1])], [v[1], np.conj(v[0])]])
            amps = _apply_gate(amps, n, u, [part.n_r + q])
    return StateVector(amps, part)


def apply_two_qubit_gate(state: StateVector, gate: np.ndarray, site: int) -> StateVector:
    """Apply a 4x4 unitary to Q qubits (site, site+1 mod n_q).

    Gate index convention: row = 2*v_site + v_partner (first qubit is the
    high bit of the 4-dimensional index).
    """
    part = state.part
    if not 0 <= site < part.n_q:
        raise IndexError(f"site {site} out of range for n_q={part.n_q}")
    if gate.shape != (4, 4):
        raise ValueError(f"two-qubit gate must be 4x4, got {gate.shape}")
    _check_unitary(gate)
    a = part.n_r + site
    b = part.n_r + (site + 1) % part.n_q
    amps = _apply_gate(state.amplitudes, part.n_total, gate, [a, b])
    return StateVector(amps, part)


def apply_single_qubit_gate(state: StateVector, gate: np.ndarray, qubit: int) -> StateVector:
    """Apply a 2x2 unitary to a global qubit index (R or Q)."""
    if not 0 <= qubit < state.n_total:
        raise IndexError(f"qubit {qubit} out of range")
    if gate.shape != (2, 2):
        raise ValueError(f"single-qubit gate must be 2x2, got {gate.shape}")
    _check_unitary(gate)
    amps = _apply_gate(state.amplitudes, state.n_total, gate, [qubit])
    return StateVector(amps, state.part)


def apply_global_unitary(state: StateVector, u: np.ndarray) -> StateVector:
    """Apply a 2^n_q x 2^n_q unitary to the Q slice (identity on R)."""
    part = state.part
    d_q = 2**part.n_q
    if u.shape != (d_q, d_q):
        raise ValueError(f"expected shape ({d_q}, {d_q}) for the Q unitary, got {u.shape}")
    _check_unitary(u)
    m = state.amplitudes.reshape(d_q, part.dim_r)
    return StateVector(np.ascontiguousarray(u @ m).reshape(-1), part)


def reduced_density_matrix(state: StateVector, keep: Iterable[int]) -> DensityMatrix:
    """Partial trace onto the given global qubits.

    ``keep`` order fixes the matrix index: keep[0] is the most significant
    bit.  The factor-dimension list records one factor of 2 per kept qubit.
    """
    keep = list(keep)
    n = state.n_total
    if len(set(keep)) != len(keep):
        raise IndexError(f"duplicate indices in keep: {keep}")
    if any(not 0 <= g < n for g in keep):
        raise IndexError(f"keep indices out of range: {keep}")
    if not keep:
        return DensityMatrix(np.ones((1, 1), dtype=complex), ())
    axes_keep = [n - 1 - g for g in keep]
    rest = [a for a in range(n) if a not in set(axes_keep)]
    m = state.amplitudes.reshape([2] * n).transpose(axes_keep + rest)
    m = np.ascontiguousarray(m).reshape(2 ** len(keep), 2 ** (n - len(keep)))
    rho = m @ m.conj().T
    return DensityMatrix(rho, (2,) * len(keep))


def rho_rs(state: StateVector) -> DensityMatrix:
    """Reduced state of R u S with factor dimensions (dim_R, dim_S)."""
    part = state.part
    dm = reduced_density_matrix(state, part.rs_keep())
    return DensityMatrix(dm.matrix, (part.dim_r, part.dim_s))


def rho_r(state: StateVector) -> DensityMatrix:
    dm = reduced_density_matrix(state, state.part.r_keep())
    return DensityMatrix(dm.matrix, (state.part.dim_r,))


def rho_s(state: StateVector) -> DensityMatrix:
    dm = reduced_density_matrix(state, state.part.s_keep())
    return DensityMatrix(dm.matrix, (state.part.dim_s,))


def state_tensor_rse(state: StateVector) -> np.ndarray:
    """Amplitudes as a (dim_R, dim_S, dim_E) tensor in block index order."""
    part = state.part
    n = part.n_total
    order = part.r_keep() + part.s_keep() + part.e_keep()
    axes = [n - 1 - g for g in order]
    t = state.amplitudes.reshape([2] * n).transpose(axes)
    return np.ascontiguousarray(t).reshape(part.dim_r, part.dim_s, part.dim_e)


def subsystem_spectrum(state: StateVector, keep: Iterable[int]) -> np.ndarray:
    """Nonzero-padded eigenvalues of the reduced state on ``keep``, computed
    from the singular values of the amplitude matrix (never forms the big
    density matrix)."""
    keep = list(keep)
    n = state.n_total
    if not keep:
        return np.array([1.0])
    axes_keep = [n - 1 - g for g in keep]
    rest = [a for a in range(n) if a not in set(axes_keep)]
    m = state.amplitudes.reshape([2] * n).transpose(axes_keep + rest)
    m = np.ascontiguousarray(m).reshape(2 ** len(keep), 2 ** (n - len(keep)))
    if m.shape[0] <= m.shape[1]:
        g = m @ m.conj().T
    else:
        g = m.conj().T @ m
    w = np.linalg.eigvalsh(g)[::-1]
    return np.clip(w, 0.0, None)


def outcome_index(outcome: str, part: PartitionSpec) -> int:
    """Map an outcome bitstring over S to the S-block integer."""
    if len(outcome) != part.n_s:
        raise ValueError(
            f"outcome length {len(outcome)} does not match |S| = {part.n_s}"
        )
    if any(c not in "01" for c in outcome):
        raise ValueError(f"outcome must be a 0/1 string, got {outcome!r}")
    return sum(1 << k for k, c in enumerate(outcome) if c == "1")


def outcome_string(index: int, part: PartitionSpec) -> str:
    return "".join("1" if index >> k & 1 else "0" for k in range(part.n_s))


def project_outcome(
    rho: DensityMatrix, part: PartitionSpec, outcome: str
) -> tuple[float, DensityMatrix | None]:
    """Probability of a computational-basis outcome on S and the conditional
    state of R; the conditional is None when the outcome is unreachable
    (probability <= P_FLOOR)."""
    d_r, d_s = part.dim_r, part.dim_s
    if rho.factor_dims != (d_r, d_s):
        raise ValueError(
            f"density matrix factors {rho.factor_dims} do not match partition "
            f"(expected ({d_r}, {d_s}))"
        )
    o = outcome_index(outcome, part)
    block = rho.matrix.reshape(d_r, d_s, d_r, d_s)[:, o, :, o]
    prob = float(np.trace(block).real)
    if prob <= P_FLOOR:
        return prob, None
    return prob, DensityMatrix(np.ascontiguousarray(block) / prob, (d_r,))
