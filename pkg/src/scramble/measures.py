"""Spectral measures on density matrices: partial transpose, negativity,
entropies, distances.  All entropies are in nats."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Eigenvalues at or below this floor are excluded from logs and from rank
# counts; finite-precision spectra of nearly pure states dip slightly
# negative.
EIG_FLOOR = 1e-12

_HERM_TOL = 1e-8


@dataclass
class DensityMatrix:
    """Hermitian trace-one matrix with its tensor-factor dimension list.

    ``factor_dims`` orders factors most-significant first: the flat row
    index is ``i_0 * (d_1 * ... ) + i_1 * (...) + ...`` exactly as produced
    by chained ``np.kron``.
    """

    matrix: np.ndarray
    factor_dims: tuple[int, ...]

    def __init__(self, matrix: np.ndarray, factor_dims, check: bool = True):
        self.matrix = np.asarray(matrix, dtype=complex)
        self.factor_dims = tuple(int(d) for d in factor_dims)
        d = int(np.prod(self.factor_dims)) if self.factor_dims else 1
        if self.matrix.shape != (d, d):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match factor dims "
                f"{self.factor_dims} (product {d})"
            )
        if check:
            herm = np.max(np.abs(self.matrix - self.matrix.conj().T))
            if herm > _HERM_TOL:
                raise ValueError(f"matrix is not Hermitian (max asymmetry {herm:.3e})")
            tr = np.trace(self.matrix)
            if abs(tr - 1.0) > _HERM_TOL:
                raise ValueError(f"matrix trace is {tr}, expected 1")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_factors(self) -> int:
        return len(self.factor_dims)

    def assert_valid(self, psd_tol: float = 1e-9) -> None:
        """Full contract check, including positive semidefiniteness."""
        herm = np.max(np.abs(self.matrix - self.matrix.conj().T))
        if herm > 1e-10:
            raise AssertionError(f"hermiticity violated: {herm:.3e}")
        tr = np.trace(self.matrix)
        if abs(tr - 1.0) > 1e-10:
            raise AssertionError(f"trace is {tr}")
        w = np.linalg.eigvalsh(self.matrix)
        if w.min() < -psd_tol:
            raise AssertionError(f"negative eigenvalue {w.min():.3e}")


def spectrum(rho: DensityMatrix) -> np.ndarray:
    """Real eigenvalues, descending."""
    return np.linalg.eigvalsh(rho.matrix)[::-1]


def purity(rho: DensityMatrix) -> float:
    """Tr rho^2 via the Frobenius norm."""
    return float(np.sum(np.abs(rho.matrix) ** 2))


def partial_transpose(rho: DensityMatrix, factor_index: int) -> np.ndarray:
    """Transpose one tensor factor; returns a plain Hermitian matrix (the
    result is generally not positive)."""
    m = rho.n_factors
    if not 0 <= factor_index < m:
        raise IndexError(f"factor index {factor_index} out of range for {m} factors")
    dims = rho.factor_dims
    t = rho.matrix.reshape(dims + dims)
    t = np.swapaxes(t, factor_index, m + factor_index)
    return np.ascontiguousarray(t).reshape(rho.dim, rho.dim)


def trace_norm(h: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    h = np.asarray(h)
    asym = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if asym > 1e-9:
        raise ValueError(f"trace_norm requires a Hermitian input (asymmetry {asym:.3e})")
    return float(np.sum(np.abs(np.linalg.eigvalsh(h))))


def log_negativity(rho_rs: DensityMatrix) -> float:
    """ln of the trace norm of the partial transpose on the second factor."""
    if rho_rs.n_factors != 2:
        raise ValueError(
            f"log_negativity needs an (R, S) factorisation, got {rho_rs.n_factors} factors"
        )
    return float(np.log(trace_norm(partial_transpose(rho_rs, 1))))


def entropy_from_eigenvalues(w: np.ndarray) -> float:
    w = w[w > EIG_FLOOR]
    if w.size == 0:
        return 0.0
    return float(-np.sum(w * np.log(w)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return entropy_from_eigenvalues(np.linalg.eigvalsh(rho.matrix))


def renyi_entropy(rho: DensityMatrix, n: int) -> float:
    """Renyi entropy for n in {0, 2}; n=0 is the log-rank above EIG_FLOOR."""
    w = np.linalg.eigvalsh(rho.matrix)
    w = w[w > EIG_FLOOR]
    if n == 0:
        return float(np.log(max(len(w), 1)))
    if n == 2:
        return float(-np.log(np.sum(w**2)))
    raise ValueError(f"renyi_entropy supports n in {{0, 2}}, got {n}")


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix, support_tol: float = 1e-10) -> float:
    """Tr[rho (ln rho - ln sigma)]; +inf when rho leaks outside sigma's support."""
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    r = np.linalg.eigvalsh(rho.matrix)
    s, v = np.linalg.eigh(sigma.matrix)
    # weight of rho on sigma's null space
    q = np.einsum("ij,ji->i", v.conj().T @ rho.matrix, v).real
    outside = float(np.sum(q[s <= EIG_FLOOR]))
    if outside > support_tol:
        return math.inf
    keep = s > EIG_FLOOR
    cross = float(np.sum(q[keep] * np.log(s[keep])))
    r = r[r > EIG_FLOOR]
    return float(np.sum(r * np.log(r)) - cross)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Half the trace norm of the difference; lies in [0, 1]."""
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(rho.matrix - sigma.matrix))))


def partial_trace(rho: DensityMatrix, keep_factor: int) -> DensityMatrix:
    """Trace out every factor except one."""
    m = rho.n_factors
    if not 0 <= keep_factor < m:
        raise IndexError(f"factor index {keep_factor} out of range for {m} factors")
    dims = rho.factor_dims
    t = rho.matrix.reshape(dims + dims)
    # contract row/col axes of every traced factor
    labels_row = list(range(m))
    labels_col = [m + i if i == keep_factor else i for i in range(m)]
    out = np.einsum(t, labels_row + labels_col, [keep_factor, m + keep_factor])
    return DensityMatrix(out, (dims[keep_factor],))


def mutual_information(rho_rs: DensityMatrix) -> float:
    """S(R) + S(S) - S(RS) for a two-factor density matrix."""
    if rho_rs.n_factors != 2:
        raise ValueError(
            f"mutual_information needs an (R, S) factorisation, got {rho_rs.n_factors} factors"
        )
    s_r = von_neumann_entropy(partial_trace(rho_rs, 0))
    s_s = von_neumann_entropy(partial_trace(rho_rs, 1))
    return s_r + s_s - von_neumann_entropy(rho_rs)
