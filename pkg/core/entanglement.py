"""Block entropy, localisable entanglement and persistency bounds"""

import hashlib
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import NamedTuple

import numpy as np

from core.errors import BudgetError, DomainError
from core.measurement import cascade, enumerate_branches, fourier_unitary, haar_unitary
from core.qudit_core import (RANK_TOL, Bipartition, StateVector, UnitaryMatrix, entropy,
                             max_swap_deviation, schmidt)
from core.singlet import full_singlet

STATES = ('singlet', 'ghz', 'w', 'cluster')
DICTIONARY_HAAR = 8
SEARCH_BUDGET = 50000


class LocalisationTrial(NamedTuple):
    entropy: float
    rank: int
    outcomes: tuple


class SearchOutcome(NamedTuple):
    bound: int
    evaluated: int


@dataclass
class PersistencyReport:
    """Dictionary upper bound plus randomized floor for one state"""

    state: str
    num_sites: int
    upper_bound: int
    certified_floor: int
    trials: int
    evaluated: int = 0
    details: list = field(default_factory=list)

    def to_dict(self):
        return {
            'state': self.state,
            'num_sites': self.num_sites,
            'upper_bound': self.upper_bound,
            'certified_floor': self.certified_floor,
            'trials': self.trials,
            'evaluated': self.evaluated,
            'details': self.details,
        }


def block_entropy(state, block):
    """Entanglement entropy (bits) across block | rest"""
    cut = Bipartition.of(block, state.num_sites)
    return entropy(schmidt(state, cut).coefficients)


def all_bipartitions(num_sites):
    """Every unordered bipartition once (block_a always holds site 0)"""
    others = range(1, num_sites)
    for size in range(0, num_sites - 1):
        for chosen in combinations(others, size):
            yield Bipartition.of((0,) + chosen, num_sites)


def min_bipartition_rank(state, rank_tol=RANK_TOL):
    """Smallest Schmidt rank over every bipartition; 1 for a single site"""
    ranks = [schmidt(state, cut, rank_tol).rank for cut in all_bipartitions(state.num_sites)]
    return min(ranks, default=1)


def is_fully_product(state, rank_tol=RANK_TOL):
    """Rank 1 across every single-site cut, equivalent to full product for pure states"""
    if state.num_sites == 1:
        return True
    return all(
        schmidt(state, Bipartition.of([site], state.num_sites), rank_tol).rank == 1
        for site in range(state.num_sites)
    )


def residual_antisymmetry(state, remaining_sites):
    """Largest ||P_ij|psi> + |psi>|| over pairs of remaining_sites"""
    return max_swap_deviation(state, remaining_sites)


def localisable_experiment(n, block_a, block_b, trials, policy, rng):
    """Measure every site outside A and B, then read A|B entanglement of the remainder"""
    block_a, block_b = sorted(set(block_a)), sorted(set(block_b))
    if set(block_a) & set(block_b):
        raise DomainError(f"blocks overlap: {block_a} and {block_b}")
    if not block_a or len(block_a) != len(block_b):
        raise DomainError("blocks must be non-empty and of equal size")
    if any(not 0 <= s < n for s in block_a + block_b):
        raise DomainError(f"blocks out of range for {n} sites")

    measured = [s for s in range(n) if s not in block_a and s not in block_b]
    remaining = sorted(block_a + block_b)
    cut_a = [remaining.index(s) for s in block_a]

    results = []
    for trial_rng in rng.spawn(trials):
        record = cascade(n, measured, policy, trial_rng)
        state = record.remaining_state()
        decomposition = schmidt(state, Bipartition.of(cut_a, state.num_sites))
        results.append(LocalisationTrial(
            entropy(decomposition.coefficients), decomposition.rank, tuple(record.measured_levels)))
    return results


def default_dictionary(num_sites, d, rng, haar=DICTIONARY_HAAR):
    """Per-site candidate bases: computational, Fourier and `haar` Haar samples"""
    return [
        [UnitaryMatrix.identity(d), fourier_unitary(d)] + [haar_unitary(d, rng) for _ in range(haar)]
        for _ in range(num_sites)
    ]


def _disentangles(state, sites, bases, rank_tol):
    return all(is_fully_product(branch.state, rank_tol) for branch in enumerate_branches(state, sites, bases))


def persistency_search(state, dictionary, budget=SEARCH_BUDGET, rank_tol=RANK_TOL):
    """Smallest M whose dictionary measurement leaves every outcome branch fully product

    Also counts the (sites, bases) configurations tried before the answer.
    """
    if not dictionary or any(not bases for bases in dictionary):
        raise DomainError("dictionary must list at least one basis per site")
    if len(dictionary) != state.num_sites:
        raise DomainError(f"dictionary covers {len(dictionary)} sites, state has {state.num_sites}")
    if is_fully_product(state, rank_tol):
        return SearchOutcome(0, 0)

    n = state.num_sites
    evaluated = 0
    for m in range(1, n):
        for sites in combinations(range(n), m):
            for bases in product(*(dictionary[s] for s in sites)):
                if evaluated >= budget:
                    raise BudgetError(
                        f"search budget of {budget} configurations exhausted at M={m}",
                        best_so_far=n - 1, evaluated=evaluated)
                evaluated += 1
                if _disentangles(state, list(sites), list(bases), rank_tol):
                    return SearchOutcome(m, evaluated)
    # Unreachable: measuring n - 1 sites always leaves a single qudit
    return SearchOutcome(n - 1, evaluated)


def persistency_upper_bound(state, dictionary, budget=SEARCH_BUDGET, rank_tol=RANK_TOL):
    return persistency_search(state, dictionary, budget, rank_tol).bound


def bases_digest(bases):
    digest = hashlib.sha256()
    for basis in bases:
        digest.update(np.round(basis.entries, 12).tobytes())
    return digest.hexdigest()[:12]


def random_disentangle_min_rank(state, m, trials, rng, rank_tol=RANK_TOL):
    """Per-trial minimum Schmidt rank after Haar-basis measurements on m random sites

    Every outcome branch is examined. Returns a list of (digest, sites, rank).
    """
    n = state.num_sites
    if not 0 <= m < n - 1:
        raise DomainError(f"need 0 <= M < {n - 1}, got {m}")
    rows = []
    for trial_rng in rng.spawn(trials):
        sites = sorted(int(s) for s in trial_rng.choice(n, size=m, replace=False))
        bases = [haar_unitary(state.local_dim, trial_rng) for _ in sites]
        rank = min(
            min_bipartition_rank(branch.state, rank_tol)
            for branch in enumerate_branches(state, sites, bases)
        )
        rows.append((bases_digest(bases), sites, rank))
    return rows


def persistency_random_certificate(n, m, trials, rng, rank_tol=RANK_TOL):
    """Minimum rank left by `trials` random M-measurement cascades on the n-singlet"""
    if not m < n - 1:
        raise DomainError(f"certificate needs M < n - 1, got M={m}, n={n}")
    rows = random_disentangle_min_rank(full_singlet(n), m, trials, rng, rank_tol)
    return min(rank for _, _, rank in rows)


def ghz_state(n):
    """(|0...0> + |1...1>)/sqrt 2 on n qubits"""
    amplitudes = np.zeros(2 ** n, dtype=complex)
    amplitudes[0] = amplitudes[-1] = 1 / np.sqrt(2)
    return StateVector(n, 2, amplitudes)


def w_state(n):
    """Equal superposition of single excitations"""
    amplitudes = np.zeros(2 ** n, dtype=complex)
    for site in range(n):
        amplitudes[1 << (n - 1 - site)] = 1 / np.sqrt(n)
    return StateVector(n, 2, amplitudes)


def cluster_state(n):
    """Linear cluster state: |+>^n followed by CZ on neighbouring qubits"""
    amplitudes = np.empty(2 ** n, dtype=complex)
    for index in range(2 ** n):
        bits = [(index >> (n - 1 - k)) & 1 for k in range(n)]
        parity = sum(a & b for a, b in zip(bits, bits[1:]))
        amplitudes[index] = (-1) ** parity
    return StateVector(n, 2, amplitudes / np.sqrt(2 ** n))


def named_state(name, n):
    if name not in STATES:
        raise DomainError(f"unknown state {name!r}; choose from {', '.join(STATES)}")
    if n < 2:
        raise DomainError(f"need at least 2 parties, got {n}")
    builders = {'singlet': full_singlet, 'ghz': ghz_state, 'w': w_state, 'cluster': cluster_state}
    return builders[name](n)


def persistency_report(state_name, n, rng, dictionary_haar=DICTIONARY_HAAR, trials=50,
                       budget=SEARCH_BUDGET, rank_tol=RANK_TOL):
    """Upper bound from the dictionary search and a floor from random cascades"""
    state = named_state(state_name, n)
    dictionary = default_dictionary(n, state.local_dim, rng, dictionary_haar)
    upper, evaluated = persistency_search(state, dictionary, budget, rank_tol)

    details = []
    largest_entangled = -1
    if min_bipartition_rank(state, rank_tol) >= 2:
        largest_entangled = 0
        for m in range(1, n - 1):
            rows = random_disentangle_min_rank(state, m, trials, rng, rank_tol)
            details.extend(
                {'m': m, 'trial': index, 'bases': digest, 'sites': [s + 1 for s in sites], 'min_rank': rank}
                for index, (digest, sites, rank) in enumerate(rows)
            )
            if min(rank for _, _, rank in rows) < 2:
                break
            largest_entangled = m

    floor = min(upper, largest_entangled + 1)
    return PersistencyReport(state_name, n, upper, floor, trials, evaluated, details)
