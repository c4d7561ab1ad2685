import math

import numpy as np
import pytest

from conftest import bell_dm, random_density
from scramble.measures import (
    DensityMatrix,
    log_negativity,
    mutual_information,
    partial_trace,
    partial_transpose,
    purity,
    relative_entropy,
    renyi_entropy,
    spectrum,
    trace_distance,
    trace_norm,
    von_neumann_entropy,
)
from scramble.models import sample_haar_unitary
from scramble.statevector import PartitionSpec, apply_global_unitary, prepare_initial_state, rho_rs

LN2 = math.log(2)


def kron_dm(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(np.kron(a.matrix, b.matrix), (a.dim, b.dim))


# ------------------------------------------------------------ density matrix


def test_density_matrix_rejects_non_hermitian():
    m = np.array([[0.5, 0.3], [0.0, 0.5]], dtype=complex)
    with pytest.raises(ValueError):
        DensityMatrix(m, (2,))


def test_density_matrix_rejects_bad_trace():
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(2, dtype=complex), (2,))


def test_density_matrix_factor_mismatch():
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(4, dtype=complex) / 4, (2,))


def test_spectrum_sums_to_trace(rng):
    rho = random_density(8, rng)
    assert spectrum(rho).sum() == pytest.approx(1.0, abs=1e-9)
    assert spectrum(rho)[0] >= spectrum(rho)[-1]


# -------------------------------------------------------- partial transpose


def test_pt_product_state_stays_psd(rng):
    rho = kron_dm(random_density(2, rng), random_density(3, rng))
    pt = partial_transpose(rho, 1)
    assert np.linalg.eigvalsh(pt).min() > -1e-12
    # exact form: rho_A x rho_B^T
    rho_a = partial_trace(rho, 0).matrix
    rho_b = partial_trace(rho, 1).matrix
    np.testing.assert_allclose(pt, np.kron(rho_a, rho_b.T), atol=1e-12)


def test_pt_bell_spectrum():
    pt = partial_transpose(bell_dm(), 1)
    w = np.sort(np.linalg.eigvalsh(pt))
    np.testing.assert_allclose(w, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


def test_pt_maximally_mixed_unchanged():
    rho = DensityMatrix(np.eye(4, dtype=complex) / 4, (2, 2))
    np.testing.assert_array_equal(partial_transpose(rho, 0), rho.matrix)


def test_double_pt_is_identity_bitwise(rng):
    rho = random_density(12, rng, factor_dims=(3, 4))
    once = partial_transpose(rho, 1)
    twice = partial_transpose(DensityMatrix(once, (3, 4), check=False), 1)
    np.testing.assert_array_equal(twice, rho.matrix)


def test_pt_trace_preserved(rng):
    rho = random_density(8, rng, factor_dims=(2, 4))
    assert np.trace(partial_transpose(rho, 0)).real == pytest.approx(1.0, abs=1e-12)


def test_pt_bad_factor_index():
    with pytest.raises(IndexError):
        partial_transpose(bell_dm(), 2)


# -------------------------------------------------------------- trace norm


def test_trace_norm_of_density_matrix_is_one(rng):
    assert trace_norm(random_density(6, rng).matrix) == pytest.approx(1.0, abs=1e-9)


def test_trace_norm_bell_pt_is_two():
    assert trace_norm(partial_transpose(bell_dm(), 1)) == pytest.approx(2.0, abs=1e-12)


def test_trace_norm_zero_matrix():
    assert trace_norm(np.zeros((3, 3))) == 0.0


def test_trace_norm_rejects_non_hermitian():
    with pytest.raises(ValueError):
        trace_norm(np.array([[0.0, 1.0], [0.0, 0.0]]))


# ------------------------------------------------------------- negativity


def test_log_negativity_bell_is_ln2():
    assert log_negativity(bell_dm()) == pytest.approx(LN2, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_log_negativity_additive_over_bell_pairs(k):
    # k Bell pairs between R and S, prepared through the register
    part = PartitionSpec(
        n_q=k, n_r=k, s_indices=tuple(range(k)), pairing=tuple((i, i) for i in range(k))
    )
    st = prepare_initial_state(part, "zero")
    assert log_negativity(rho_rs(st)) == pytest.approx(k * LN2, abs=1e-10)


def test_log_negativity_product_state_zero(rng):
    rho = kron_dm(random_density(2, rng), random_density(2, rng))
    assert abs(log_negativity(rho)) < 1e-10


def test_log_negativity_local_unitary_invariance(rng):
    part = PartitionSpec(n_q=2, n_r=1, s_indices=(0,), pairing=((0, 0),))
    st = prepare_initial_state(part, "zero")
    st = apply_global_unitary(st, sample_haar_unitary(4, rng))
    rho = rho_rs(st)
    base = log_negativity(rho)
    for _ in range(5):
        u = np.kron(sample_haar_unitary(2, rng), sample_haar_unitary(2, rng))
        rotated = DensityMatrix(u @ rho.matrix @ u.conj().T, rho.factor_dims, check=False)
        assert log_negativity(rotated) == pytest.approx(base, abs=1e-9)


# --------------------------------------------------------------- entropies


def test_vn_entropy_pure_state():
    rho = DensityMatrix(np.diag([1.0, 0.0]).astype(complex), (2,))
    assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_vn_entropy_maximally_mixed(k):
    rho = DensityMatrix(np.eye(2**k, dtype=complex) / 2**k, (2**k,))
    assert von_neumann_entropy(rho) == pytest.approx(k * LN2, abs=1e-12)


def test_vn_entropy_frozen_scalar():
    # -(3/4) ln(3/4) - (1/4) ln(1/4), evaluated independently
    rho = DensityMatrix(np.diag([0.75, 0.25]).astype(complex), (2,))
    expected = 0.75 * math.log(4 / 3) + 0.25 * math.log(4)
    assert expected == pytest.approx(0.5623351446188083, abs=1e-15)
    assert von_neumann_entropy(rho) == pytest.approx(expected, abs=1e-12)


def test_renyi_pure_state():
    rho = DensityMatrix(np.diag([1.0, 0.0]).astype(complex), (2,))
    assert renyi_entropy(rho, 2) == pytest.approx(0.0, abs=1e-12)
    assert renyi_entropy(rho, 0) == pytest.approx(0.0, abs=1e-12)


def test_renyi_maximally_mixed():
    rho = DensityMatrix(np.eye(8, dtype=complex) / 8, (8,))
    for n in (0, 2):
        assert renyi_entropy(rho, n) == pytest.approx(3 * LN2, abs=1e-12)


def test_renyi_frozen_scalar():
    rho = DensityMatrix(np.diag([0.75, 0.25]).astype(complex), (2,))
    assert renyi_entropy(rho, 2) == pytest.approx(math.log(1.6), abs=1e-12)
    assert math.log(1.6) == pytest.approx(0.47000362924573563, abs=1e-15)


def test_renyi_unsupported_order():
    with pytest.raises(ValueError):
        renyi_entropy(bell_dm(), 3)


def test_renyi_sandwich_on_random_states(rng):
    for _ in range(25):
        rho = random_density(6, rng, rank=int(rng.integers(1, 7)))
        s0 = renyi_entropy(rho, 0)
        s1 = von_neumann_entropy(rho)
        s2 = renyi_entropy(rho, 2)
        assert s0 >= s1 - 1e-9
        assert s1 >= s2 - 1e-9


def test_entropy_additive_over_tensor_products(rng):
    a, b = random_density(3, rng), random_density(4, rng)
    assert von_neumann_entropy(kron_dm(a, b)) == pytest.approx(
        von_neumann_entropy(a) + von_neumann_entropy(b), abs=1e-9
    )


# --------------------------------------------------------- relative entropy


def test_relative_entropy_self_is_zero(rng):
    rho = random_density(5, rng)
    assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-10)


def test_relative_entropy_pure_vs_mixed():
    pure = DensityMatrix(np.diag([1.0, 0.0]).astype(complex), (2,))
    mixed = DensityMatrix(np.eye(2, dtype=complex) / 2, (2,))
    assert relative_entropy(pure, mixed) == pytest.approx(LN2, abs=1e-12)


def test_relative_entropy_to_maximally_mixed_identity(rng):
    # S_rel(rho || I/d) = ln d - S_vN(rho) for any state
    for _ in range(10):
        rho = random_density(4, rng, rank=int(rng.integers(1, 5)))
        mixed = DensityMatrix(np.eye(4, dtype=complex) / 4, (4,))
        assert relative_entropy(rho, mixed) == pytest.approx(
            2 * LN2 - von_neumann_entropy(rho), abs=1e-9
        )


def test_relative_entropy_support_violation_is_inf():
    rho = DensityMatrix(np.diag([0.0, 1.0]).astype(complex), (2,))
    sigma = DensityMatrix(np.diag([1.0, 0.0]).astype(complex), (2,))
    assert relative_entropy(rho, sigma) == math.inf


def test_relative_entropy_shape_mismatch():
    with pytest.raises(ValueError):
        relative_entropy(bell_dm(), DensityMatrix(np.eye(2, dtype=complex) / 2, (2,)))


def test_pinsker_on_random_pairs(rng):
    for _ in range(25):
        rho, sigma = random_density(4, rng), random_density(4, rng)
        lhs = relative_entropy(rho, sigma)
        td = trace_distance(rho, sigma)
        assert lhs >= 0.5 * (2 * td) ** 2 - 1e-9


# ------------------------------------------------------------ trace distance


def test_trace_distance_identical(rng):
    rho = random_density(4, rng)
    assert trace_distance(rho, rho) == 0.0


def test_trace_distance_orthogonal_pure():
    a = DensityMatrix(np.diag([1.0, 0.0]).astype(complex), (2,))
    b = DensityMatrix(np.diag([0.0, 1.0]).astype(complex), (2,))
    assert trace_distance(a, b) == pytest.approx(1.0, abs=1e-12)


def test_trace_distance_pure_vs_mixed():
    a = DensityMatrix(np.diag([1.0, 0.0]).astype(complex), (2,))
    b = DensityMatrix(np.eye(2, dtype=complex) / 2, (2,))
    assert trace_distance(a, b) == pytest.approx(0.5, abs=1e-12)


def test_trace_distance_triangle_and_symmetry(rng):
    for _ in range(15):
        a, b, c = (random_density(4, rng) for _ in range(3))
        assert trace_distance(a, b) == pytest.approx(trace_distance(b, a), abs=1e-12)
        assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-10


# -------------------------------------------------------- mutual information


def test_mutual_information_product_is_zero(rng):
    rho = kron_dm(random_density(2, rng), random_density(4, rng))
    assert mutual_information(rho) == pytest.approx(0.0, abs=1e-9)


def test_mutual_information_bell():
    assert mutual_information(bell_dm()) == pytest.approx(2 * LN2, abs=1e-10)


def test_mutual_information_pure_full_q(rng):
    # S = all of Q makes rho_RS pure: I_RS = 2 S_R = 2 n_R ln2
    part = PartitionSpec(n_q=3, n_r=2, s_indices=(0, 1, 2), pairing=((0, 0), (1, 2)))
    st = prepare_initial_state(part, "zero")
    st = apply_global_unitary(st, sample_haar_unitary(8, rng))
    assert mutual_information(rho_rs(st)) == pytest.approx(4 * LN2, abs=1e-9)


def test_mutual_information_bounded_by_marginals(rng):
    part = PartitionSpec(n_q=3, n_r=1, s_indices=(0,), pairing=((0, 1),))
    st = prepare_initial_state(part, "haar_single_qubit", rng_seed=13)
    st = apply_global_unitary(st, sample_haar_unitary(8, rng))
    rho = rho_rs(st)
    mi = mutual_information(rho)
    s_r = von_neumann_entropy(partial_trace(rho, 0))
    s_s = von_neumann_entropy(partial_trace(rho, 1))
    assert -1e-9 <= mi <= 2 * min(s_r, s_s) + 1e-9


def test_partial_trace_marginals(rng):
    rho = kron_dm(random_density(2, rng), random_density(3, rng))
    a = partial_trace(rho, 0)
    assert a.dim == 2 and np.trace(a.matrix).real == pytest.approx(1.0, abs=1e-12)


def test_purity_matches_spectrum(rng):
    rho = random_density(6, rng, rank=2)
    assert purity(rho) == pytest.approx(float(np.sum(spectrum(rho) ** 2)), abs=1e-12)
