import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.entanglement import min_bipartition_rank
from core.errors import DomainError, NumericalError, ValidationError
from core.measurement import (TwoLevelFactor, cascade, enumerate_branches, fourier_unitary,
                              haar_unitary, householder_qr, is_subspace_compatible, measure_site,
                              outcome_probabilities, reck_factorize, restricted_basis,
                              sample_outcome, subspace_rotation_check, theorem2_check)
from core.qudit_core import (StateVector, UnitaryMatrix, basis_state, fidelity_up_to_phase,
                             max_swap_deviation, unitarity_deviation)
from core.singlet import SingletSpec, build_singlet, full_singlet


class FixedDraw:
    def __init__(self, value):
        self.value = value

    def random(self):
        return self.value


def test_householder_qr(rng):
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    q, r = householder_qr(a)
    assert_allclose(q @ r, a, atol=1e-12)
    assert unitarity_deviation(q) < 1e-12
    assert_allclose(np.tril(r, -1), 0, atol=1e-12)


def test_haar_unitary_contract():
    one = haar_unitary(1, np.random.default_rng(0))
    assert abs(one.entries[0, 0]) == pytest.approx(1.0)
    a = haar_unitary(3, np.random.default_rng(42))
    b = haar_unitary(3, np.random.default_rng(42))
    assert unitarity_deviation(a.entries) < 1e-12
    assert_allclose(a.entries, b.entries)
    assert abs(np.linalg.det(haar_unitary(4, np.random.default_rng(1)).entries)) == pytest.approx(1.0, abs=1e-10)


def test_haar_unitary_rejects_zero_dimension(rng):
    with pytest.raises(DomainError):
        haar_unitary(0, rng)


def test_fourier_basis_is_unitary():
    assert unitarity_deviation(fourier_unitary(5).entries) < 1e-12


def test_product_state_measurement_is_certain():
    result = measure_site(basis_state([0, 0], 2), 0, UnitaryMatrix.identity(2), np.random.default_rng(0))
    assert result.outcome == 0
    assert result.probability == pytest.approx(1.0)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_singlet_outcomes_are_uniform_in_any_basis(n, rng):
    probabilities = outcome_probabilities(full_singlet(n), 1, haar_unitary(n, rng))
    assert_allclose(probabilities, np.full(n, 1 / n), atol=1e-10)


def test_collapse_leaves_two_party_singlet():
    result = measure_site(full_singlet(3), 0, UnitaryMatrix.identity(3), forced=0)
    assert result.probability == pytest.approx(1 / 3)
    tail = build_singlet(SingletSpec(2, 3, excluded_levels=(0,)))
    expected = StateVector(3, 3, np.kron([1, 0, 0], tail.amplitudes))
    assert fidelity_up_to_phase(result.collapsed, expected) >= 1 - 1e-10
    assert result.collapsed.norm() == pytest.approx(1.0)


def test_vanishing_state_raises():
    with pytest.raises(NumericalError):
        measure_site(StateVector(2, 2, np.zeros(4)), 0, UnitaryMatrix.identity(2), np.random.default_rng(0))


def test_sampling_needs_rng():
    with pytest.raises(DomainError):
        measure_site(full_singlet(2), 0, UnitaryMatrix.identity(2))


def test_last_nonempty_bin_absorbs_residual():
    assert sample_outcome(np.array([0.3, 0.3, 0.0]), FixedDraw(0.99)) == 1
    assert sample_outcome(np.array([0.5, 0.5]), FixedDraw(0.25)) == 0
    assert sample_outcome(np.array([0.5, 0.5]), FixedDraw(0.5)) == 1


def test_single_site_measurement_identity_basis():
    assert theorem2_check(3, UnitaryMatrix.identity(3), 0) >= 1 - 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
def test_single_site_measurement_any_basis(n, rng):
    unitary = haar_unitary(n, rng)
    for outcome in range(n):
        assert theorem2_check(n, unitary, outcome) >= 1 - 1e-10


def test_restricted_basis_block_structure(rng):
    previous = haar_unitary(3, rng)
    assert_allclose(restricted_basis(previous, {0}, np.eye(2)).entries, previous.entries)
    swapped = restricted_basis(previous, {0}, np.array([[0, 1], [1, 0]]))
    assert_allclose(swapped.column(0), previous.column(0))
    assert_allclose(swapped.column(1), previous.column(2))
    with pytest.raises(DomainError):
        restricted_basis(previous, {0}, np.eye(3))


def test_restricted_cascade_keeps_reduced_singlet():
    record = cascade(4, [0, 1], 'restricted_random', np.random.default_rng(1))
    assert record.remaining_singlet_fidelity() >= 1 - 1e-9
    assert all(0 < step.probability <= 1 for step in record.steps)
    assert record.remaining_sites == [2, 3]
    assert unitarity_deviation(record.final_basis.entries) < 1e-11


@pytest.mark.parametrize("m", [1, 2, 3])
def test_restricted_cascades_on_five_parties(m, rng):
    for trial_rng in rng.spawn(5):
        record = cascade(5, list(range(m)), 'restricted_random', trial_rng)
        assert record.remaining_singlet_fidelity() >= 1 - 1e-9


@pytest.mark.parametrize("policy", ['restricted_random', 'fixed', 'arbitrary_random'])
def test_measuring_all_but_one_leaves_product(policy, rng):
    record = cascade(5, [0, 1, 2, 3], policy, rng)
    assert min_bipartition_rank(record.final_state) == 1


def test_fixed_cascade_matches_single_site_check(rng):
    record = cascade(3, [0], 'fixed', rng)
    outcome = record.measured_levels[0]
    assert theorem2_check(3, UnitaryMatrix.identity(3), outcome) >= 1 - 1e-10
    assert record.remaining_singlet_fidelity() >= 1 - 1e-10


def test_arbitrary_cascade_preserves_antisymmetry(rng):
    record = cascade(4, [1], 'arbitrary_random', rng)
    assert max_swap_deviation(record.final_state, record.remaining_sites) < 1e-9


def test_cascade_errors(rng):
    with pytest.raises(DomainError):
        cascade(3, [0, 1, 2], 'fixed', rng)
    with pytest.raises(DomainError):
        cascade(3, [0, 0], 'fixed', rng)
    with pytest.raises(DomainError):
        cascade(3, [0], 'adaptive', rng)


def test_branches_cover_all_probability(rng):
    # One shared basis: equal outcomes on two sites have zero weight
    state = full_singlet(4)
    basis = haar_unitary(4, rng)
    branches = list(enumerate_branches(state, [0, 2], [basis, basis]))
    assert sum(b.probability for b in branches) == pytest.approx(1.0)
    assert len(branches) == 12
    assert all(b.state.num_sites == 2 for b in branches)
    assert all(len(set(b.outcomes)) == 2 for b in branches)


def test_reck_two_level_input(rng):
    decomposition = reck_factorize(haar_unitary(2, rng))
    assert len(decomposition.factors) == 1


def test_reck_identity():
    decomposition = reck_factorize(UnitaryMatrix.identity(4))
    assert decomposition.factors == []
    assert_allclose(decomposition.phases, np.ones(4))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_reck_reconstruction(d, rng):
    for _ in range(10):
        unitary = haar_unitary(d, rng)
        decomposition = reck_factorize(unitary)
        assert len(decomposition.factors) <= d * (d - 1) // 2
        assert np.max(np.abs(decomposition.reconstruct() - unitary.entries)) < 1e-9
        for factor in decomposition.factors:
            assert factor.levels[0] < factor.levels[1]
            assert unitarity_deviation(factor.block) < 1e-12


def test_reck_rejects_non_unitary():
    with pytest.raises(ValidationError):
        reck_factorize(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_subspace_compatibility():
    assert is_subspace_compatible([TwoLevelFactor((0, 1), np.eye(2))], {0, 1})
    assert is_subspace_compatible([TwoLevelFactor((2, 3), np.eye(2))], {0, 1})
    assert not is_subspace_compatible([TwoLevelFactor((1, 2), np.eye(2))], {0, 1})


def test_compatible_rotation_keeps_embedded_singlet(rng):
    block = np.eye(3, dtype=complex)
    block[:2, :2] = haar_unitary(2, rng).entries
    block[2, 2] = np.exp(0.3j)
    spec = SingletSpec(2, 3, excluded_levels=(2,))
    compatible = subspace_rotation_check(spec, UnitaryMatrix(block))
    assert compatible['compatible']
    assert compatible['fidelity'] >= 1 - 1e-9

    incompatible = subspace_rotation_check(spec, haar_unitary(3, rng))
    assert not incompatible['compatible']
    assert incompatible['antisymmetry_deviation'] < 1e-9


def test_independent_bases_keep_every_branch(rng):
    state = full_singlet(4)
    branches = list(enumerate_branches(state, [0, 2], [haar_unitary(4, rng), haar_unitary(4, rng)]))
    assert len(branches) == 16
    assert sum(b.probability for b in branches) == pytest.approx(1.0)
