"""Scenario configuration, dispatch and run reports for the command-line harness"""

import time
from dataclasses import dataclass, field
from math import comb, log2

import numpy as np
import scipy.linalg

from core.entanglement import (STATES, block_entropy, localisable_experiment,
                               persistency_report, residual_antisymmetry)
from core.errors import ValidationError
from core.hubbard import (build_hubbard, compare_effective, enumerate_sector, gap_scaling_fit,
                          illegal_hop_weight, two_site_ground_energy)
from core.measurement import cascade
from core.network import TOPOLOGIES, load_network, make_topology, randomize_couplings
from core.perm_hamiltonian import ground_state, verify_all_pair_eigenstate
from core.qudit_core import fidelity_up_to_phase, partial_trace
from core.singlet import full_singlet
from utils.helpers import load_json_resource, make_rng, parse_site_list

DEFAULTS = load_json_resource('scenario_defaults.json', {})
COMMANDS = tuple(DEFAULTS.get('commands', {}))
ARTIFACT_VERSION = DEFAULTS.get('artifact_version', '1.0.0')

INT_KEYS = {'n', 'm', 'l', 'd', 'k', 'trials', 'budget', 'seed', 'dense_limit', 'max_iter', 'dictionary_haar'}
POSITIVE_KEYS = {'tol', 'rank_tol', 'coupling', 't', 'u', 'max_ratio'}


@dataclass
class Assertion:
    name: str
    passed: bool
    value: object = None
    threshold: object = None

    def to_dict(self):
        return {'name': self.name, 'passed': bool(self.passed), 'value': self.value, 'threshold': self.threshold}


def check(name, value, threshold, passed):
    return Assertion(name, bool(passed), value, threshold)


@dataclass
class ScenarioConfig:
    """A command plus its fully resolved parameters"""

    command: str
    params: dict = field(default_factory=dict)

    @classmethod
    def resolve(cls, command, file_data=None, overrides=None):
        """Defaults, then the config file, then command-line flags"""
        if command not in COMMANDS:
            raise ValidationError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
        params = dict(DEFAULTS['commands'][command])

        if file_data:
            if not isinstance(file_data, dict):
                raise ValidationError("config file must hold a JSON object")
            if 'params' in file_data or 'command' in file_data:
                unknown = set(file_data) - {'command', 'params'}
                if unknown:
                    raise ValidationError(f"unknown config keys: {sorted(unknown)}")
                if file_data.get('command', command) != command:
                    raise ValidationError(
                        f"config file is for {file_data['command']!r}, not {command!r}")
                file_params = file_data.get('params', {})
            else:
                file_params = file_data
            cls._reject_unknown(command, params, file_params)
            params.update(file_params)

        overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        cls._reject_unknown(command, params, overrides)
        params.update(overrides)

        config = cls(command, params)
        config.validate()
        return config

    @staticmethod
    def _reject_unknown(command, allowed, given):
        unknown = set(given) - set(allowed)
        if unknown:
            raise ValidationError(f"unknown parameters for {command}: {sorted(unknown)}")

    def validate(self):
        p = self.params
        for key in INT_KEYS & set(p):
            if p[key] is None:
                continue
            if isinstance(p[key], bool) or not isinstance(p[key], (int, np.integer)):
                raise ValidationError(f"{key} must be an integer, got {p[key]!r}")
        for key in POSITIVE_KEYS & set(p):
            if not isinstance(p[key], (int, float)) or not p[key] > 0:
                raise ValidationError(f"{key} must be positive, got {p[key]!r}")
        if p.get('seed') is None or p['seed'] < 0:
            raise ValidationError("seed must be a non-negative integer")
        for key in ('n', 'trials', 'budget', 'k', 'dense_limit', 'max_iter'):
            if key in p and p[key] < 1:
                raise ValidationError(f"{key} must be at least 1, got {p[key]}")
        if 'policy' in p and p['policy'] not in DEFAULTS['policies']:
            raise ValidationError(f"policy must be one of {sorted(DEFAULTS['policies'])}")
        if 'topology' in p and p['topology'] not in TOPOLOGIES + ('file',):
            raise ValidationError(f"topology must be one of {TOPOLOGIES + ('file',)}")
        if 'state' in p and p['state'] not in STATES:
            raise ValidationError(f"state must be one of {STATES}")
        if 'level' in p and p['level'] not in DEFAULTS['levels']:
            raise ValidationError(f"level must be one of {sorted(DEFAULTS['levels'])}")
        if 'fit_t' in p and (not isinstance(p['fit_t'], list) or any(not t > 0 for t in p['fit_t'])):
            raise ValidationError("fit_t must be a list of positive values")
        return self


@dataclass
class RunReport:
    """Outcome of one scenario; `passed` is the conjunction of its assertions"""

    command: str
    params: dict
    results: dict
    passed: bool
    wall_time_ms: float = 0.0
    artifact_version: str = ARTIFACT_VERSION

    def to_dict(self):
        return {
            'command': self.command,
            'params': self.params,
            'results': self.results,
            'pass': self.passed,
            'wall_time_ms': self.wall_time_ms,
            'artifact_version': self.artifact_version,
        }


def policy_name(short):
    return DEFAULTS['policies'].get(short, short)


def _ground_state(p, rng):
    if p['network']:
        net = load_network(p['network'])
    elif p['topology'] == 'file':
        raise ValidationError("topology 'file' needs a network path")
    else:
        net = make_topology(p['topology'], p['n'], p['coupling'], p['seed'])
    if p['random_couplings']:
        net = randomize_couplings(net, rng)
    d = p['d'] or net.num_vertices

    spectrum = ground_state(net, d, k=p['k'], tol=p['tol'], dense_limit=p['dense_limit'],
                            max_iter=p['max_iter'], seed=p['seed'])
    expected = -net.total_coupling
    antisymmetry = verify_all_pair_eigenstate(spectrum.ground_state, net)
    results = {
        'network': net.to_dict(),
        'd': d,
        'energy': spectrum.ground_energy,
        'expected_energy': expected,
        'lowest_energies': spectrum.lowest_energies,
        'degeneracy': spectrum.degeneracy,
        'gap': spectrum.gap,
        'method': spectrum.method,
        'iterations': spectrum.iterations,
        'max_pair_swap_deviation': antisymmetry,
    }

    tol = 1e-8 if spectrum.method == 'dense' else 1e-6
    if d == net.num_vertices:
        fidelity = fidelity_up_to_phase(spectrum.ground_state, full_singlet(d))
        results['singlet_fidelity'] = fidelity
        relative = abs(spectrum.ground_energy - expected) / abs(expected)
        assertions = [
            check('ground_energy', relative, tol, relative <= tol),
            check('degeneracy', spectrum.degeneracy, 1, spectrum.degeneracy == 1),
            check('singlet_fidelity', fidelity, 1 - tol, fidelity >= 1 - tol),
            check('all_pair_antisymmetry', antisymmetry, 1e-6, antisymmetry < 1e-6),
        ]
    else:
        assertions = [check('energy_lower_bound', spectrum.ground_energy, expected,
                            spectrum.ground_energy >= expected - 1e-10)]
    return results, assertions


def _measure_cascade(p, rng):
    n, m = p['n'], p['m']
    sites = parse_site_list(p['sites']) if p['sites'] is not None else list(range(m))
    policy = policy_name(p['policy'])

    rows = []
    for trial, trial_rng in enumerate(rng.spawn(p['trials'])):
        record = cascade(n, sites, policy, trial_rng)
        remaining = record.remaining_state()
        rows.append({
            'trial': trial,
            'outcomes': record.measured_levels,
            'probabilities': [step.probability for step in record.steps],
            'fidelity': None if policy == 'arbitrary_random' else record.remaining_singlet_fidelity(),
            'antisymmetry': residual_antisymmetry(record.final_state, record.remaining_sites),
            'entropy': block_entropy(remaining, [0]) if remaining.num_sites > 1 else 0.0,
        })

    antisymmetry = max(row['antisymmetry'] for row in rows)
    entropies = [row['entropy'] for row in rows]
    results = {'sites': [s + 1 for s in sites], 'policy': policy, 'trials': rows,
               'max_antisymmetry': antisymmetry}
    assertions = [check('residual_antisymmetry', antisymmetry, 1e-9, antisymmetry < 1e-9)]
    if policy != 'arbitrary_random':
        fidelity = min(row['fidelity'] for row in rows)
        spread = max(entropies) - min(entropies)
        results.update(min_fidelity=fidelity, entropy_spread=spread)
        assertions += [
            check('remaining_singlet_fidelity', fidelity, 1 - 1e-9, fidelity >= 1 - 1e-9),
            check('entropy_spread', spread, 1e-8, spread < 1e-8),
        ]
    return results, assertions


def _block_entropy(p, rng):
    n = p['n']
    block = parse_site_list(p['block']) if p['block'] is not None else list(range(p['l']))
    state = full_singlet(n)
    value = block_entropy(state, block)
    expected = log2(comb(n, len(block)))

    spectrum = partial_trace(state, block).eigenvalues()
    nonzero = spectrum[spectrum > p['rank_tol']]
    flatness = float(np.max(np.abs(nonzero - 1 / comb(n, len(block)))))
    rows = [
        {'l': size, 'entropy_bits': block_entropy(state, list(range(size))), 'expected': log2(comb(n, size))}
        for size in range(1, n)
    ]
    results = {
        'block': [s + 1 for s in block],
        'entropy_bits': value,
        'expected_bits': expected,
        'reduced_rank': int(nonzero.size),
        'spectrum_flatness': flatness,
        'trials': rows,
    }
    assertions = [
        check('block_entropy', abs(value - expected), 1e-8, abs(value - expected) <= 1e-8),
        check('reduced_rank', int(nonzero.size), comb(n, len(block)), nonzero.size == comb(n, len(block))),
        check('spectrum_flatness', flatness, 1e-9, flatness <= 1e-9),
    ]
    return results, assertions


def _localize(p, rng):
    block_a, block_b = parse_site_list(p['block_a']), parse_site_list(p['block_b'])
    policy = policy_name(p['policy'])
    trials = localisable_experiment(p['n'], block_a, block_b, p['trials'], policy, rng)

    size = len(block_a)
    expected_rank = comb(2 * size, size)
    expected_entropy = log2(expected_rank)
    rows = [
        {'trial': k, 'entropy': trial.entropy, 'rank': trial.rank, 'outcomes': list(trial.outcomes)}
        for k, trial in enumerate(trials)
    ]
    entropies = [trial.entropy for trial in trials]
    results = {
        'block_a': [s + 1 for s in block_a],
        'block_b': [s + 1 for s in block_b],
        'policy': policy,
        'expected_rank': expected_rank,
        'expected_entropy': expected_entropy,
        'entropy_spread': max(entropies) - min(entropies),
        'trials': rows,
    }
    assertions = []
    if policy != 'arbitrary_random':
        error = max(abs(e - expected_entropy) for e in entropies)
        ranks_ok = all(trial.rank == expected_rank for trial in trials)
        assertions = [
            check('localised_entropy', error, 1e-8, error <= 1e-8),
            check('localised_rank', expected_rank, expected_rank, ranks_ok),
        ]
    return results, assertions


def expected_persistency(state, n):
    if state == 'ghz':
        return 1
    if state == 'cluster':
        return n // 2
    return n - 1


def _persistency(p, rng):
    report = persistency_report(p['state'], p['n'], rng, dictionary_haar=p['dictionary_haar'],
                                trials=p['trials'], budget=p['budget'], rank_tol=p['rank_tol'])
    expected = expected_persistency(p['state'], p['n'])
    results = report.to_dict()
    results['trials'] = results.pop('details')
    results['expected_upper_bound'] = expected
    results['num_trials'] = report.trials

    assertions = [
        check('upper_bound', report.upper_bound, expected, report.upper_bound == expected),
        check('floor_below_bound', report.certified_floor, report.upper_bound,
              report.certified_floor <= report.upper_bound),
    ]
    if p['state'] == 'singlet':
        assertions.append(check('singlet_floor', report.certified_floor, p['n'] - 1,
                                report.certified_floor == p['n'] - 1))
    return results, assertions


def _hubbard_check(p, rng):
    d, t, u = p['d'], p['t'], p['u']
    comparison = compare_effective(d, d, t, u, p['max_ratio'])
    results = comparison.to_dict()

    sector = enumerate_sector(d, d)
    chain = make_topology('chain', d)
    hamiltonian = build_hubbard(chain, t, u, sector)
    illegal = illegal_hop_weight(hamiltonian, sector, chain)
    results['illegal_hop_weight'] = illegal
    assertions = [
        check('spacing_error', comparison.max_relative_gap_error, comparison.bound,
              comparison.max_relative_gap_error <= comparison.bound),
        check('species_conservation', illegal, 0.0, illegal == 0.0),
    ]

    if d == 2:
        lowest = float(scipy.linalg.eigvalsh(hamiltonian)[0])
        closed = float(two_site_ground_energy(t, u))
        exponent, prefactor = gap_scaling_fit(u, p['fit_t'], p['max_ratio'])
        results.update(ground_energy=lowest, closed_form=closed, fit_exponent=exponent,
                       fit_prefactor=prefactor, trials=[
                           {'t': tv, 'gap_closed_form': (np.sqrt(u ** 2 + 16 * tv ** 2) - u) / 2, 'J': 4 * tv ** 2 / u}
                           for tv in p['fit_t']])
        assertions += [
            check('two_site_closed_form', abs(lowest - closed), 1e-12, abs(lowest - closed) <= 1e-12),
            check('gap_exponent', exponent, 2.0, abs(exponent - 2.0) <= 0.02),
            check('gap_prefactor', prefactor, 4 / u, abs(prefactor * u / 4 - 1) <= 0.02),
        ]
    return results, assertions


def _verify_all(p, rng):
    from core.acceptance import verify_all

    report = verify_all(p['seed'], p['level'])
    results = dict(report.results)
    assertions = [Assertion(**a) for a in results.pop('assertions')]
    return results, assertions


HANDLERS = {
    'ground-state': _ground_state,
    'measure-cascade': _measure_cascade,
    'block-entropy': _block_entropy,
    'localize': _localize,
    'persistency': _persistency,
    'hubbard-check': _hubbard_check,
    'verify-all': _verify_all,
}


def finish(command, params, results, assertions, started):
    results = dict(results)
    results['assertions'] = [a.to_dict() for a in assertions]
    passed = all(a.passed for a in assertions)
    elapsed = (time.perf_counter() - started) * 1000
    return RunReport(command, dict(params), results, passed, round(elapsed, 3))


def run_scenario(config):
    """Run one scenario; deterministic given (config, seed)"""
    started = time.perf_counter()
    config.validate()
    rng = make_rng(config.params['seed'])
    results, assertions = HANDLERS[config.command](config.params, rng)
    return finish(config.command, config.params, results, assertions, started)
