import math

import numpy as np
import pytest

from conftest import bell_dm, random_density
from scramble.ensemble import (
    build_projected_ensemble,
    ensemble_D_RS,
    ensemble_Delta_RS,
    ensemble_from_state,
    factorization_gap,
)
from scramble.errors import ResourceLimitError
from scramble.measures import (
    DensityMatrix,
    relative_entropy,
    trace_distance,
    von_neumann_entropy,
)
from scramble.models import build_fruc_floquet, evolve, sample_haar_unitary
from scramble.statevector import (
    PartitionSpec,
    apply_global_unitary,
    prepare_initial_state,
    rho_rs,
)

LN2 = math.log(2)
Z = np.diag([1.0, -1.0]).astype(complex)


def kron_dm(a, b):
    return DensityMatrix(np.kron(a.matrix, b.matrix), (a.dim, b.dim))


def bell_part():
    return PartitionSpec(n_q=1, n_r=1, s_indices=(0,), pairing=((0, 0),))


def evolved_state(rng, n_q=3, n_r=1, s=(0, 1)):
    part = PartitionSpec(
        n_q=n_q, n_r=n_r, s_indices=s, pairing=tuple((k, n_q - 1 - k) for k in range(n_r))
    )
    st = prepare_initial_state(part, "haar_single_qubit", rng_seed=21)
    return apply_global_unitary(st, sample_haar_unitary(2**n_q, rng))


# ------------------------------------------------------------- construction


def test_bell_ensemble_entries():
    ens = build_projected_ensemble(bell_dm(), bell_part())
    assert [e.outcome for e in ens.entries] == ["0", "1"]
    for e, proj in zip(ens.entries, (np.diag([1.0, 0]), np.diag([0, 1.0]))):
        assert e.probability == pytest.approx(0.5, abs=1e-12)
        np.testing.assert_allclose(e.conditional.matrix, proj, atol=1e-12)


def test_product_state_gives_constant_conditionals(rng):
    rho_r_part = random_density(2, rng)
    ens = build_projected_ensemble(kron_dm(rho_r_part, random_density(2, rng)), bell_part())
    for e in ens.entries:
        if e.conditional is not None:
            np.testing.assert_allclose(e.conditional.matrix, rho_r_part.matrix, atol=1e-10)


def test_maximally_mixed_ensemble():
    rho = DensityMatrix(np.eye(4, dtype=complex) / 4, (2, 2))
    ens = build_projected_ensemble(rho, bell_part())
    for e in ens.entries:
        assert e.probability == pytest.approx(0.5, abs=1e-12)
        np.testing.assert_allclose(e.conditional.matrix, np.eye(2) / 2, atol=1e-12)


def test_first_moment_identity(rng):
    st = evolved_state(rng)
    ens = build_projected_ensemble(rho_rs(st), st.part)
    assert ens.total_probability() == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(ens.first_moment(), ens.reference.matrix, atol=1e-9)


def test_fast_path_matches_projection_route(rng):
    st = evolved_state(rng, n_q=4, n_r=2, s=(1, 3))
    a = build_projected_ensemble(rho_rs(st), st.part)
    b = ensemble_from_state(st)
    assert [e.outcome for e in a.entries] == [e.outcome for e in b.entries]
    for ea, eb in zip(a.entries, b.entries):
        assert ea.probability == pytest.approx(eb.probability, abs=1e-12)
        np.testing.assert_allclose(ea.conditional.matrix, eb.conditional.matrix, atol=1e-11)
    np.testing.assert_allclose(a.reference.matrix, b.reference.matrix, atol=1e-12)


def test_ensemble_cap_enforced():
    part = PartitionSpec(n_q=6, n_r=0, s_indices=tuple(range(6)), pairing=())
    st = prepare_initial_state(part, "zero")
    with pytest.raises(ResourceLimitError):
        ensemble_from_state(st, cap=2**5)
    with pytest.raises(ResourceLimitError):
        build_projected_ensemble(
            DensityMatrix(np.eye(64, dtype=complex) / 64, (1, 64)), part, cap=2**5
        )


# ----------------------------------------------------------------- measures


def test_bell_ensemble_measures():
    ens = build_projected_ensemble(bell_dm(), bell_part())
    assert ensemble_D_RS(ens) == pytest.approx(LN2, abs=1e-10)
    assert ensemble_Delta_RS(ens) == pytest.approx(0.5, abs=1e-10)


def test_product_ensemble_measures_are_zero(rng):
    ens = build_projected_ensemble(kron_dm(random_density(2, rng), random_density(2, rng)), bell_part())
    assert ensemble_D_RS(ens) == pytest.approx(0.0, abs=1e-9)
    assert ensemble_Delta_RS(ens) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_partial_bell_pairs_give_k_ln2(k):
    # k of the 2 R qubits have partners inside S, the rest pair into E
    n_r = 2
    part = PartitionSpec(
        n_q=4,
        n_r=n_r,
        s_indices=tuple(range(k)),
        pairing=tuple((i, i) for i in range(n_r)),
    )
    st = prepare_initial_state(part, "zero")
    ens = build_projected_ensemble(rho_rs(st), part)
    assert ensemble_D_RS(ens) == pytest.approx(k * LN2, abs=1e-9)
    expected_delta = 1.0 - 2.0**-k
    assert ensemble_Delta_RS(ens) == pytest.approx(expected_delta, abs=1e-9)
    # independent check of the pure-conditional value for one outcome
    e = ens.entries[0]
    if e.conditional is not None:
        by_hand = trace_distance(e.conditional, ens.reference)
        assert by_hand == pytest.approx(expected_delta, abs=1e-9)


def test_equation_shortcut_when_reference_maximally_mixed(rng):
    # D_RS via relative entropy equals sum p (n_R ln2 - S_vN(cond)) exactly
    # when rho_R = I/2^{n_R}
    st = evolved_state(rng, n_q=4, n_r=2, s=(0, 2))
    ens = ensemble_from_state(st)
    direct = ensemble_D_RS(ens)
    shortcut = sum(
        e.probability * (2 * LN2 - von_neumann_entropy(e.conditional))
        for e in ens.entries
        if e.conditional is not None
    )
    assert direct == pytest.approx(shortcut, abs=1e-8)


def test_per_outcome_pinsker(rng):
    st = evolved_state(rng, n_q=4, n_r=1, s=(0, 1, 2))
    ens = ensemble_from_state(st)
    for e in ens.entries:
        if e.conditional is None:
            continue
        td = trace_distance(e.conditional, ens.reference)
        srel = relative_entropy(e.conditional, ens.reference)
        assert 2 * td**2 <= srel + 1e-9


def test_schmidt_rank_ceiling(rng):
    # conditionals of a pure |psi_RSE> cannot exceed min(n_E, n_R) ln2
    for n_q, n_r, s in ((4, 2, (0, 1, 2)), (4, 2, (0,)), (3, 1, (0, 1))):
        st = evolved_state(rng, n_q=n_q, n_r=n_r, s=s)
        n_e = n_q - len(s)
        cap = min(n_e, n_r) * LN2
        ens = ensemble_from_state(st)
        for e in ens.entries:
            if e.conditional is not None:
                assert von_neumann_entropy(e.conditional) <= cap + 1e-9
        assert ensemble_D_RS(ens) >= (n_r - min(n_e, n_r)) * LN2 - 1e-9


def test_zero_probability_entries_contribute_nothing():
    # classically correlated state reaching only outcomes "00" and "01"
    diag = np.zeros(8)
    diag[0] = 0.5  # (r=0, s="00")
    diag[6] = 0.5  # (r=1, s="01")
    rho = DensityMatrix(np.diag(diag).astype(complex), (2, 4))
    part = PartitionSpec(n_q=2, n_r=1, s_indices=(0, 1), pairing=((0, 0),))
    ens = build_projected_ensemble(rho, part)
    by_outcome = {e.outcome: e for e in ens.entries}
    assert by_outcome["10"].conditional is None
    assert by_outcome["11"].conditional is None
    assert ensemble_D_RS(ens) == pytest.approx(LN2, abs=1e-10)
    assert ensemble_Delta_RS(ens) == pytest.approx(0.5, abs=1e-10)


def test_fruc_evolved_ensemble_probabilities_sum(rng):
    part = PartitionSpec(n_q=4, n_r=2, s_indices=(0, 1), pairing=((0, 1), (1, 2)))
    st = prepare_initial_state(part, "zero")
    st = evolve(st, build_fruc_floquet(4, rng), 4)
    ens = ensemble_from_state(st)
    assert ens.total_probability() == pytest.approx(1.0, abs=1e-9)


# --------------------------------------------------------- factorization gap


def test_factorization_gap_product_state(rng):
    rho = kron_dm(random_density(2, rng), random_density(2, rng))
    assert factorization_gap(rho, Z, Z) < 1e-10


def test_factorization_gap_bell_quarter():
    assert factorization_gap(bell_dm(), Z, Z) == pytest.approx(0.25, abs=1e-12)


def test_factorization_gap_maximally_mixed():
    rho = DensityMatrix(np.eye(4, dtype=complex) / 4, (2, 2))
    assert factorization_gap(rho, Z, Z) < 1e-12


def test_factorization_gap_degenerate_multisite():
    # Z x Z on a two-qubit S factor has two eigenvalues only; projector sums
    # must be used
    part = PartitionSpec(n_q=2, n_r=1, s_indices=(0, 1), pairing=((0, 0),))
    st = prepare_initial_state(part, "zero")
    rho = rho_rs(st)
    gap = factorization_gap(rho, Z, np.kron(Z, Z))
    assert gap == pytest.approx(0.25, abs=1e-10)


def test_factorization_gap_validates_inputs():
    with pytest.raises(ValueError):
        factorization_gap(bell_dm(), np.eye(4), Z)
    with pytest.raises(ValueError):
        factorization_gap(bell_dm(), np.array([[0, 1], [0, 0]], dtype=complex), Z)
