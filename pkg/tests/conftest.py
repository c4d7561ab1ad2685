import numpy as np
import pytest

from scramble.measures import DensityMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_density(dim, rng, factor_dims=None, rank=None):
    """Wishart-style random density matrix, optionally rank-limited."""
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    return DensityMatrix(rho, factor_dims or (dim,))


def bell_dm():
    """Bell-pair density matrix with (R, S) factor structure."""
    v = np.zeros(4, dtype=complex)
    v[0b00] = v[0b11] = 1 / np.sqrt(2)
    return DensityMatrix(np.outer(v, v.conj()), (2, 2))
