from math import comb, log2

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.entanglement import (all_bipartitions, block_entropy, cluster_state, default_dictionary,
                               ghz_state, is_fully_product, localisable_experiment,
                               min_bipartition_rank, named_state, persistency_random_certificate,
                               persistency_report, persistency_search, persistency_upper_bound,
                               residual_antisymmetry, w_state)
from core.errors import BudgetError, DomainError
from core.qudit_core import basis_state, partial_trace
from core.singlet import full_singlet


@pytest.mark.parametrize("n, block, expected", [
    (4, [0], 2.0),
    (4, [0, 1], log2(6)),
    (5, [0, 1], log2(10)),
    (5, [1, 3], log2(10)),
    (6, [0, 2, 4], log2(20)),
])
def test_block_entropy_of_singlet(n, block, expected):
    assert block_entropy(full_singlet(n), block) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_reduced_spectrum_is_flat(n):
    for size in range(1, n):
        values = partial_trace(full_singlet(n), range(size)).eigenvalues()
        nonzero = values[values > 1e-10]
        assert nonzero.size == comb(n, size)
        assert_allclose(nonzero, 1 / comb(n, size), atol=1e-9)


def test_bipartitions_enumerated_once():
    cuts = list(all_bipartitions(4))
    assert len(cuts) == 2 ** 3 - 1
    assert all(0 in cut.block_a for cut in cuts)


def test_min_rank_and_product_checks():
    assert min_bipartition_rank(full_singlet(3)) == 3
    assert min_bipartition_rank(basis_state([1], 3)) == 1
    assert is_fully_product(basis_state([0, 1, 1], 2))
    assert not is_fully_product(ghz_state(3))


def test_residual_antisymmetry():
    assert residual_antisymmetry(full_singlet(4), range(4)) < 1e-12
    assert residual_antisymmetry(basis_state([0, 0], 2), [0, 1]) >= 1


def test_oracle_states():
    assert_allclose(cluster_state(2).amplitudes, np.array([1, 1, 1, -1]) / 2)
    for builder in (ghz_state, w_state, cluster_state):
        assert builder(4).norm() == pytest.approx(1.0)
    with pytest.raises(DomainError):
        named_state('dicke', 3)


def test_localised_pair_is_one_ebit(rng):
    trials = localisable_experiment(4, [0], [1], 5, 'restricted_random', rng)
    assert len(trials) == 5
    for trial in trials:
        assert trial.entropy == pytest.approx(1.0, abs=1e-8)
        assert trial.rank == 2


def test_localised_entanglement_is_basis_independent(rng):
    entropies = [t.entropy for t in localisable_experiment(3, [0], [2], 8, 'restricted_random', rng)]
    assert max(entropies) - min(entropies) < 1e-8
    assert entropies[0] == pytest.approx(1.0, abs=1e-8)


def test_localisable_block_errors(rng):
    with pytest.raises(DomainError):
        localisable_experiment(4, [0, 1], [1, 2], 1, 'restricted_random', rng)
    with pytest.raises(DomainError):
        localisable_experiment(4, [0], [1, 2], 1, 'restricted_random', rng)


@pytest.mark.slow
def test_six_party_two_block_localisation(rng):
    for trial in localisable_experiment(6, [0, 1], [2, 3], 5, 'restricted_random', rng):
        assert trial.rank == 6
        assert trial.entropy == pytest.approx(log2(6), abs=1e-8)


@pytest.mark.parametrize("state, expected", [
    (ghz_state(3), 1),
    (w_state(3), 2),
    (cluster_state(4), 2),
    (full_singlet(3), 2),
    (basis_state([0, 1, 0], 2), 0),
])
def test_persistency_upper_bound_oracles(state, expected, rng):
    dictionary = default_dictionary(state.num_sites, state.local_dim, rng)
    assert persistency_upper_bound(state, dictionary) == expected


def test_persistency_search_counts_configurations(rng):
    dictionary = default_dictionary(3, 2, rng)
    outcome = persistency_search(ghz_state(3), dictionary)
    assert outcome.bound == 1
    assert 1 <= outcome.evaluated <= 3 * len(dictionary[0])
    assert persistency_search(basis_state([0, 1, 0], 2), dictionary) == (0, 0)


def test_persistency_search_budget(rng):
    dictionary = default_dictionary(3, 3, rng)
    with pytest.raises(BudgetError) as info:
        persistency_upper_bound(full_singlet(3), dictionary, budget=5)
    assert info.value.best_so_far == 2
    assert info.value.evaluated == 5


def test_persistency_dictionary_must_cover_sites(rng):
    with pytest.raises(DomainError):
        persistency_upper_bound(full_singlet(3), default_dictionary(2, 3, rng))


@pytest.mark.parametrize("n, m, expected", [(4, 1, 3), (4, 2, 2), (3, 1, 2), (5, 1, 4), (5, 2, 3)])
def test_random_certificate(n, m, expected, rng):
    assert persistency_random_certificate(n, m, 20, rng) == expected


def test_random_certificate_needs_two_remaining(rng):
    with pytest.raises(DomainError):
        persistency_random_certificate(4, 3, 5, rng)


def test_persistency_report_singlet(rng):
    report = persistency_report('singlet', 3, rng, trials=10)
    assert report.upper_bound == 2
    assert report.certified_floor == 2
    assert len(report.details) == 10
    assert all(row['min_rank'] >= 2 for row in report.details)


def test_persistency_report_ghz(rng):
    report = persistency_report('ghz', 3, rng, trials=10)
    assert report.upper_bound == 1
    assert report.certified_floor == 1
    assert report.to_dict()['state'] == 'ghz'
