"""End-to-end verification suite run by `verify-all`"""

import time
from itertools import combinations
from math import comb, log2

import numpy as np
import scipy.linalg

from core.entanglement import (block_entropy, ghz_state, localisable_experiment, persistency_report,
                               persistency_upper_bound, default_dictionary, residual_antisymmetry,
                               w_state, cluster_state)
from core.errors import RegimeError
from core.hubbard import (build_hubbard, compare_effective, enumerate_sector, gap_scaling_fit,
                          illegal_hop_weight, two_site_ground_energy)
from core.measurement import (cascade, haar_unitary, reck_factorize, subspace_rotation_check,
                              theorem2_check)
from core.network import make_topology, randomize_couplings
from core.perm_hamiltonian import (ground_state, heisenberg_deviation, sampled_energy_minimum,
                                   verify_all_pair_eigenstate, verify_transposition_path)
from core.qudit_core import UnitaryMatrix, fidelity_up_to_phase, random_state
from core.scenario import DEFAULTS, check, finish
from core.singlet import SingletSpec, agrawal_property_check, full_singlet, one_site_expansion
from utils.helpers import make_rng


def _networks(n, count, rng):
    nets = [make_topology(kind, n) for kind in ('chain', 'ring', 'star', 'complete')]
    nets += [make_topology('random_connected', n, seed=int(rng.integers(2 ** 31))) for _ in range(count)]
    return [randomize_couplings(net, rng) for net in nets]


def ground_states(caps, rng):
    """Ground energy, degeneracy, singlet fidelity and all-pair antisymmetry"""
    worst = {'energy': 0.0, 'fidelity': 1.0, 'antisymmetry': 0.0, 'degeneracy': 1, 'sampled_minimum': 0.0}
    for n in range(3, min(5, caps['max_n']) + 1):
        singlet = full_singlet(n)
        for net in _networks(n, caps['random_topologies'], rng):
            spectrum = ground_state(net, n)
            expected = -net.total_coupling
            worst['energy'] = max(worst['energy'], abs(spectrum.ground_energy - expected) / abs(expected))
            worst['fidelity'] = min(worst['fidelity'], fidelity_up_to_phase(spectrum.ground_state, singlet))
            worst['antisymmetry'] = max(worst['antisymmetry'],
                                        verify_all_pair_eigenstate(spectrum.ground_state, net))
            worst['degeneracy'] = max(worst['degeneracy'], spectrum.degeneracy)
            worst['sampled_minimum'] = min(worst['sampled_minimum'], sampled_energy_minimum(net, n, 5, rng) - expected)

    assertions = [
        check('ground_energy', worst['energy'], 1e-8, worst['energy'] <= 1e-8),
        check('ground_degeneracy', worst['degeneracy'], 1, worst['degeneracy'] == 1),
        check('ground_singlet_fidelity', worst['fidelity'], 1 - 1e-8, worst['fidelity'] >= 1 - 1e-8),
        check('ground_antisymmetry', worst['antisymmetry'], 1e-6, worst['antisymmetry'] < 1e-6),
        check('energy_lower_bound', worst['sampled_minimum'], -1e-10, worst['sampled_minimum'] >= -1e-10),
    ]

    if caps['max_n'] >= 6:
        net = make_topology('chain', 6)
        spectrum = ground_state(net, 6, k=2)
        relative = abs(spectrum.ground_energy + net.total_coupling) / net.total_coupling
        fidelity = fidelity_up_to_phase(spectrum.ground_state, full_singlet(6))
        assertions += [
            check('lanczos_ground_energy', relative, 1e-6, relative <= 1e-6),
            check('lanczos_singlet_fidelity', fidelity, 1 - 1e-6, fidelity >= 1 - 1e-6),
            check('lanczos_antisymmetry', verify_all_pair_eigenstate(spectrum.ground_state, net), 1e-6,
                  verify_all_pair_eigenstate(spectrum.ground_state, net) < 1e-6),
        ]
    return assertions


def exchange_identities(caps, rng):
    """Transposition paths, the qubit exchange identity and singlet expansions"""
    star = make_topology('star', 4)
    state = random_state(4, 3, rng)
    path = max(verify_transposition_path(star, i, j, state) for i, j in combinations(range(1, 5), 2))
    heisenberg = heisenberg_deviation(random_state(2, 2, rng), 0, 1)
    expansion = max(one_site_expansion(n) for n in range(2, caps['max_n'] + 1))
    agrawal = max(agrawal_property_check(n, haar_unitary(n, rng)) for n in range(2, caps['max_n'] + 1))
    return [
        check('transposition_path', path, 1e-12, path < 1e-12),
        check('heisenberg_identity', heisenberg, 1e-12, heisenberg < 1e-12),
        check('one_site_expansion', expansion, 1e-10, expansion < 1e-10),
        check('local_unitary_transfer', agrawal, 1e-9, agrawal < 1e-9),
    ]


def single_site_measurement(caps, rng):
    """Remaining state after one measurement is the reduced singlet, every outcome"""
    worst = 1.0
    for n in range(3, min(5, caps['max_n']) + 1):
        for _ in range(caps['collapse_bases']):
            unitary = haar_unitary(n, rng)
            worst = min(worst, min(theorem2_check(n, unitary, k) for k in range(n)))
    return [check('single_site_fidelity', worst, 1 - 1e-9, worst >= 1 - 1e-9)]


def restricted_cascades(caps, rng):
    """Restricted cascades keep an (n - M)-singlet with outcome-independent entropy"""
    n = min(5, caps['max_n'])
    worst, spread = 1.0, 0.0
    for m in range(1, n - 1):
        entropies = []
        for trial_rng in rng.spawn(caps['cascade_trials']):
            record = cascade(n, list(range(m)), 'restricted_random', trial_rng)
            worst = min(worst, record.remaining_singlet_fidelity())
            entropies.append(block_entropy(record.remaining_state(), [0]))
        spread = max(spread, max(entropies) - min(entropies))
    return [
        check('cascade_fidelity', worst, 1 - 1e-9, worst >= 1 - 1e-9),
        check('cascade_entropy_spread', spread, 1e-8, spread < 1e-8),
    ]


def block_entropies(caps, rng):
    """log2 C(n, L) for contiguous and scattered blocks"""
    worst = 0.0
    for n in range(3, caps['max_n'] + 1):
        state = full_singlet(n)
        for size in range(1, n):
            scattered = sorted(int(s) for s in rng.choice(n, size=size, replace=False))
            for block in (list(range(size)), scattered):
                worst = max(worst, abs(block_entropy(state, block) - log2(comb(n, size))))
    return [check('block_entropy', worst, 1e-8, worst <= 1e-8)]


def localisable(caps, rng):
    """A|B rank C(2 nb, nb) after measuring every other site"""
    if caps['max_n'] >= 6:
        n, block_a, block_b = 6, [0, 1], [2, 3]
    else:
        n, block_a, block_b = 4, [0], [1]
    expected = comb(2 * len(block_a), len(block_a))
    trials = localisable_experiment(n, block_a, block_b, caps['localize_trials'], 'restricted_random', rng)
    error = max(abs(trial.entropy - log2(expected)) for trial in trials)
    ranks_ok = all(trial.rank == expected for trial in trials)
    return [
        check('localised_entropy', error, 1e-8, error <= 1e-8),
        check('localised_rank', expected, expected, ranks_ok),
    ]


def persistency(caps, rng):
    """Singlet persistency n - 1 and the GHZ / W / cluster oracles"""
    assertions = []
    for n in (3, 4):
        report = persistency_report('singlet', n, rng, trials=caps['certificate_trials'])
        assertions.append(check(f'singlet_{n}_upper_bound', report.upper_bound, n - 1, report.upper_bound == n - 1))
        assertions.append(check(f'singlet_{n}_floor', report.certified_floor, n - 1,
                                report.certified_floor == n - 1))
    for name, state, expected in (('ghz_3', ghz_state(3), 1), ('w_3', w_state(3), 2),
                                  ('cluster_4', cluster_state(4), 2)):
        bound = persistency_upper_bound(state, default_dictionary(state.num_sites, 2, rng))
        assertions.append(check(f'{name}_upper_bound', bound, expected, bound == expected))
    return assertions


def arbitrary_antisymmetry(caps, rng):
    """Arbitrary-basis cascades leave the unmeasured sites antisymmetric"""
    worst = 0.0
    for m in (1, 2):
        for trial_rng in rng.spawn(caps['antisymmetry_trials']):
            record = cascade(4, list(range(m)), 'arbitrary_random', trial_rng)
            worst = max(worst, residual_antisymmetry(record.final_state, record.remaining_sites))
    return [check('arbitrary_antisymmetry', worst, 1e-9, worst < 1e-9)]


def reck(caps, rng):
    """Two-level factorisation and subspace-compatible rotations"""
    error, excess = 0.0, 0
    for d in range(2, 6):
        for _ in range(caps['reck_samples']):
            unitary = haar_unitary(d, rng)
            decomposition = reck_factorize(unitary)
            error = max(error, float(np.max(np.abs(decomposition.reconstruct() - unitary.entries))))
            excess = max(excess, len(decomposition.factors) - d * (d - 1) // 2)

    block = np.eye(3, dtype=complex)
    block[:2, :2] = haar_unitary(2, rng).entries
    block[2, 2] = np.exp(1j * rng.uniform(0, 2 * np.pi))
    compatible = subspace_rotation_check(SingletSpec(2, 3, excluded_levels=(2,)), UnitaryMatrix(block))
    return [
        check('reck_reconstruction', error, 1e-9, error < 1e-9),
        check('reck_factor_count', excess, 0, excess <= 0),
        check('compatible_rotation', compatible['fidelity'], 1 - 1e-9,
              compatible['compatible'] and compatible['fidelity'] >= 1 - 1e-9),
    ]


def hubbard(caps, rng):
    """Exchange limit of the Hubbard model"""
    two = compare_effective(2, 2, 0.1, 10.0)
    three = compare_effective(3, 3, 0.02, 4.0)
    exponent, prefactor = gap_scaling_fit(1.0, [0.01, 0.02, 0.04])

    sector = enumerate_sector(2, 2)
    chain = make_topology('chain', 2)
    closed = 0.0
    for t, u in zip(rng.uniform(0.01, 0.5, 10), rng.uniform(1.0, 20.0, 10)):
        lowest = scipy.linalg.eigvalsh(build_hubbard(chain, t, u, sector))[0]
        closed = max(closed, abs(lowest - two_site_ground_energy(t, u)))

    ring, three_sector = make_topology('ring', 3), enumerate_sector(3, 3)
    illegal = illegal_hop_weight(build_hubbard(ring, 0.02, 4.0, three_sector), three_sector, ring)

    try:
        compare_effective(2, 2, 0.5, 1.0)
        guarded = False
    except RegimeError:
        guarded = True

    return [
        check('two_species_spacing', two.max_relative_gap_error, 4.1e-4, two.max_relative_gap_error <= 4.1e-4),
        check('three_species_spacing', three.max_relative_gap_error, three.bound,
              three.max_relative_gap_error <= three.bound),
        check('gap_exponent', exponent, 2.0, abs(exponent - 2.0) <= 0.02),
        check('gap_prefactor', prefactor, 4.0, abs(prefactor / 4.0 - 1) <= 0.02),
        check('two_site_closed_form', closed, 1e-12, closed <= 1e-12),
        check('regime_guard', guarded, True, guarded),
        check('species_conservation', illegal, 0.0, illegal == 0.0),
    ]


def determinism(caps, rng):
    """Same seed, same cascade"""
    seed = int(rng.integers(2 ** 31))
    first = cascade(4, [0, 1], 'restricted_random', make_rng(seed))
    second = cascade(4, [0, 1], 'restricted_random', make_rng(seed))
    same = (first.measured_levels == second.measured_levels
            and np.array_equal(first.final_state.amplitudes, second.final_state.amplitudes))
    return [check('seeded_determinism', same, True, same)]


CRITERIA = (
    ('ground_state', ground_states),
    ('exchange_identities', exchange_identities),
    ('single_site_measurement', single_site_measurement),
    ('restricted_cascades', restricted_cascades),
    ('block_entropy', block_entropies),
    ('localisable_entanglement', localisable),
    ('persistency', persistency),
    ('arbitrary_antisymmetry', arbitrary_antisymmetry),
    ('reck_factorisation', reck),
    ('hubbard_reduction', hubbard),
    ('determinism', determinism),
)


def verify_all(seed=0, level='quick'):
    """Run every criterion with the level's size caps; one child rng per criterion"""
    started = time.perf_counter()
    caps = DEFAULTS['levels'][level]
    rows, assertions = [], []
    for (name, criterion), child in zip(CRITERIA, make_rng(seed).spawn(len(CRITERIA))):
        outcome = criterion(caps, child)
        assertions.extend(outcome)
        rows.append({
            'criterion': name,
            'checks': len(outcome),
            'passed': all(a.passed for a in outcome),
            'failed': [a.name for a in outcome if not a.passed],
        })
    results = {'level': level, 'max_n': caps['max_n'], 'trials': rows}
    return finish('verify-all', {'level': level, 'seed': seed}, results, assertions, started)
