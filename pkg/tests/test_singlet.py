from math import factorial

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import DomainError
from core.measurement import haar_unitary
from core.qudit_core import UnitaryMatrix, max_swap_deviation
from core.singlet import (SingletSpec, agrawal_property_check, build_singlet,
                          check_rotation_invariance, full_singlet, levi_civita_sign,
                          one_site_expansion)


@pytest.mark.parametrize("perm, sign", [
    ((0, 1, 2), 1),
    ((1, 0, 2), -1),
    ((1, 2, 0), 1),
    ((2, 1, 0), -1),
    ((3, 2, 1, 0), 1),
])
def test_levi_civita_sign(perm, sign):
    assert levi_civita_sign(perm) == sign


def test_two_party_singlet_amplitudes():
    expected = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert_allclose(full_singlet(2).amplitudes, expected)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_singlet_is_normalized_and_antisymmetric(n):
    state = full_singlet(n)
    assert state.norm() == pytest.approx(1.0)
    assert np.count_nonzero(state.amplitudes) == factorial(n)
    assert max_swap_deviation(state) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_rotation_invariance(n, rng):
    assert check_rotation_invariance(full_singlet(n), haar_unitary(n, rng)) < 1e-10


def test_reduced_singlet_with_excluded_level():
    state = build_singlet(SingletSpec(2, 3, excluded_levels=(0,)))
    # (|12> - |21>)/sqrt 2
    expected = np.zeros(9)
    expected[1 * 3 + 2] = 1 / np.sqrt(2)
    expected[2 * 3 + 1] = -1 / np.sqrt(2)
    assert_allclose(state.amplitudes, expected)


def test_single_party_singlet_is_basis_vector(rng):
    basis = haar_unitary(3, rng)
    state = build_singlet(SingletSpec(1, 3, basis=basis, excluded_levels=(0, 2)))
    assert_allclose(state.amplitudes, basis.column(1))


def test_rotated_basis_singlet_equals_rotated_state(rng):
    basis = haar_unitary(3, rng)
    direct = build_singlet(SingletSpec(3, 3, basis=basis))
    assert abs(np.vdot(direct.amplitudes, full_singlet(3).amplitudes)) == pytest.approx(1.0)


@pytest.mark.parametrize("kwargs", [
    {'n_parties': 0, 'local_dim': 2},
    {'n_parties': 3, 'local_dim': 2},
    {'n_parties': 2, 'local_dim': 3},
    {'n_parties': 2, 'local_dim': 3, 'excluded_levels': (3,)},
    {'n_parties': 2, 'local_dim': 2, 'basis': UnitaryMatrix.identity(3)},
])
def test_invalid_specs(kwargs):
    with pytest.raises(DomainError):
        SingletSpec(**kwargs)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_one_site_expansion(n):
    assert one_site_expansion(n) < 1e-10


def test_one_site_expansion_range():
    with pytest.raises(DomainError):
        one_site_expansion(7)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_local_unitary_moves_to_other_parties(n, rng):
    assert agrawal_property_check(n, haar_unitary(n, rng)) < 1e-10
