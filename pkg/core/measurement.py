"""Projective measurements in arbitrary local bases and the measurement cascade

A cascade measures sites of the n-singlet one after another. Under the
restricted policy every new basis differs from the previous one only on
the levels not yet observed, which keeps the unmeasured parties in a
labelled (n - M)-singlet of the final basis.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from core.errors import DomainError, NumericalError, ValidationError
from core.qudit_core import (StateVector, UnitaryMatrix, apply_product_unitary,
                             as_matrix, conditional_state, decode_index,
                             fidelity_up_to_phase, max_swap_deviation,
                             unitarity_deviation)
from core.singlet import SingletSpec, build_singlet, check_rotation_invariance, full_singlet

POLICIES = ('restricted_random', 'fixed', 'arbitrary_random')
ZERO_PROBABILITY = 1e-14
BRANCH_CUTOFF = 1e-12
SKIP_TOL = 1e-13


class MeasurementOutcome(NamedTuple):
    outcome: int
    probability: float
    collapsed: StateVector


class Branch(NamedTuple):
    outcomes: tuple
    probability: float
    state: StateVector


@dataclass
class MeasurementStep:
    site: int
    basis: UnitaryMatrix
    outcome: int
    probability: float


@dataclass
class MeasurementRecord:
    """Ordered measurement steps of one cascade and the collapsed joint state"""

    steps: list
    final_state: StateVector
    policy: str = 'fixed'

    @property
    def measured_sites(self):
        return [step.site for step in self.steps]

    @property
    def measured_levels(self):
        """Observed level indices; the excluded vector of the remaining singlet"""
        return [step.outcome for step in self.steps]

    @property
    def remaining_sites(self):
        measured = set(self.measured_sites)
        return [s for s in range(self.final_state.num_sites) if s not in measured]

    @property
    def final_basis(self):
        if self.steps:
            return self.steps[-1].basis
        return UnitaryMatrix.identity(self.final_state.local_dim)

    def remaining_state(self):
        """State of the unmeasured qudits (ascending site order)"""
        state = self.final_state
        # Highest site first so lower indices stay valid
        for step in sorted(self.steps, key=lambda s: s.site, reverse=True):
            state = conditional_state(state, step.site, step.basis.column(step.outcome))
        return state

    def expected_singlet(self):
        """The (n - M)-singlet in B_M with the observed levels excluded"""
        n = self.final_state.num_sites
        return build_singlet(SingletSpec(
            n - len(self.steps), self.final_state.local_dim,
            basis=self.final_basis, excluded_levels=tuple(self.measured_levels)))

    def remaining_singlet_fidelity(self):
        return fidelity_up_to_phase(self.remaining_state(), self.expected_singlet())


@dataclass(frozen=True, eq=False)
class TwoLevelFactor:
    """2 x 2 unitary block acting on levels (p, q), p < q"""

    levels: tuple
    block: np.ndarray

    def embed(self, dim):
        p, q = self.levels
        matrix = np.eye(dim, dtype=complex)
        matrix[np.ix_([p, q], [p, q])] = self.block
        return matrix


@dataclass
class ReckDecomposition:
    """U = F_1 F_2 ... F_k D with two-level factors F and diagonal phase D"""

    dim: int
    factors: list = field(default_factory=list)
    phases: np.ndarray = None

    def reconstruct(self):
        matrix = np.eye(self.dim, dtype=complex)
        for factor in self.factors:
            matrix = matrix @ factor.embed(self.dim)
        return matrix @ np.diag(self.phases)


def householder_qr(matrix):
    """Complex QR by Householder reflections"""
    r = np.array(matrix, dtype=complex)
    m, n = r.shape
    q = np.eye(m, dtype=complex)
    for k in range(min(m - 1, n)):
        x = r[k:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        r[k:, :] -= 2.0 * np.outer(v, v.conj() @ r[k:, :])
        q[:, k:] -= 2.0 * np.outer(q[:, k:] @ v, v.conj())
    return q, r


def haar_unitary(dim, rng):
    """Haar-random unitary: QR of a complex Ginibre matrix with R-diagonal phases removed"""
    if dim < 1:
        raise DomainError(f"dimension must be at least 1, got {dim}")
    ginibre = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = householder_qr(ginibre)
    diagonal = np.diag(r)
    phases = np.where(np.abs(diagonal) > 0, diagonal / np.where(diagonal == 0, 1, np.abs(diagonal)), 1.0)
    return UnitaryMatrix(q * phases)


def fourier_unitary(dim):
    """Discrete Fourier basis"""
    grid = np.outer(np.arange(dim), np.arange(dim))
    return UnitaryMatrix(np.exp(2j * np.pi * grid / dim) / np.sqrt(dim))


def outcome_amplitudes(state, site, basis):
    """Rows <beta_k|_site |psi>, one per outcome k, over the other sites"""
    if as_matrix(basis).shape[0] != state.local_dim:
        raise DomainError(f"basis dimension {as_matrix(basis).shape[0]} != local dimension {state.local_dim}")
    if not 0 <= site < state.num_sites:
        raise DomainError(f"site {site} out of range for {state.num_sites} sites")
    moved = np.moveaxis(state.tensor(), site, 0).reshape(state.local_dim, -1)
    return as_matrix(basis).conj().T @ moved


def outcome_probabilities(state, site, basis):
    rows = outcome_amplitudes(state, site, basis)
    return np.sum(np.abs(rows) ** 2, axis=1)


def sample_outcome(probabilities, rng):
    """Inverse-CDF draw; the last non-empty bin absorbs rounding residual"""
    cumulative = np.cumsum(probabilities)
    index = int(np.searchsorted(cumulative, rng.random(), side='right'))
    if index >= len(probabilities):
        index = int(np.flatnonzero(np.asarray(probabilities) > ZERO_PROBABILITY)[-1])
    return index


def measure_site(state, site, basis, rng=None, forced=None):
    """Von Neumann measurement {|beta_k><beta_k|} at one site

    With `forced` set the outcome is post-selected instead of sampled; the
    reported probability is still the Born probability.
    """
    rows = outcome_amplitudes(state, site, basis)
    probabilities = np.sum(np.abs(rows) ** 2, axis=1)
    if np.all(probabilities < ZERO_PROBABILITY):
        raise NumericalError("every outcome probability vanishes; state is corrupted")

    if forced is not None:
        outcome = int(forced)
        if not 0 <= outcome < state.local_dim:
            raise DomainError(f"forced outcome {outcome} out of range")
        if probabilities[outcome] < ZERO_PROBABILITY:
            raise NumericalError(f"forced outcome {outcome} has zero probability")
    else:
        if rng is None:
            raise DomainError("sampling a measurement needs an explicit rng")
        outcome = sample_outcome(probabilities, rng)

    row = rows[outcome] / np.sqrt(probabilities[outcome])
    rest_shape = (state.local_dim,) * (state.num_sites - 1)
    collapsed = np.multiply.outer(as_matrix(basis)[:, outcome], row.reshape(rest_shape))
    collapsed = StateVector.from_tensor(np.moveaxis(collapsed, 0, site))
    return MeasurementOutcome(outcome, float(probabilities[outcome]), collapsed)


def theorem2_check(n, unitary, outcome):
    """Fidelity of the post-measurement remainder with S_{n-1}(beta; beta_outcome)"""
    if unitary.dim != n:
        raise DomainError(f"basis dimension {unitary.dim} != {n}")
    result = measure_site(full_singlet(n), 0, unitary, forced=outcome)
    remaining = conditional_state(result.collapsed, 0, unitary.column(outcome))
    oracle = build_singlet(SingletSpec(n - 1, n, basis=unitary, excluded_levels=(outcome,)))
    return fidelity_up_to_phase(remaining, oracle)


def restricted_basis(previous, measured_levels, rotation):
    """previous composed with a block acting as `rotation` on the unmeasured levels"""
    measured = sorted(set(measured_levels))
    complement = [level for level in range(previous.dim) if level not in measured]
    rotation = as_matrix(rotation)
    if rotation.shape[0] != len(complement):
        raise DomainError(
            f"rotation dimension {rotation.shape[0]} != {len(complement)} unmeasured levels")
    block = np.eye(previous.dim, dtype=complex)
    block[np.ix_(complement, complement)] = rotation
    return UnitaryMatrix(previous.entries @ block)


def _next_basis(policy, basis, measured_levels, n, rng):
    if policy == 'restricted_random':
        return restricted_basis(basis, measured_levels, haar_unitary(n - len(measured_levels), rng))
    if policy == 'arbitrary_random':
        return haar_unitary(n, rng)
    return UnitaryMatrix.identity(n)


def cascade(n, sites, policy, rng):
    """Successive single-site measurements of the n-singlet"""
    if policy not in POLICIES:
        raise DomainError(f"unknown policy {policy!r}; choose from {', '.join(POLICIES)}")
    sites = [int(s) for s in sites]
    if len(set(sites)) != len(sites):
        raise DomainError(f"sites must be distinct, got {sites}")
    if any(not 0 <= s < n for s in sites):
        raise DomainError(f"sites {sites} out of range for {n} parties")
    if len(sites) >= n:
        raise DomainError(f"at most {n - 1} measurements, got {len(sites)}")

    state = full_singlet(n)
    basis = UnitaryMatrix.identity(n)
    steps, measured_levels = [], []
    for site in sites:
        basis = _next_basis(policy, basis, measured_levels, n, rng)
        result = measure_site(state, site, basis, rng)
        steps.append(MeasurementStep(site, basis, result.outcome, result.probability))
        measured_levels.append(result.outcome)
        state = result.collapsed

    return MeasurementRecord(steps, state, policy)


def enumerate_branches(state, sites, bases):
    """Every outcome branch (probability > 1e-12) of measuring `sites` in `bases`"""
    sites = list(sites)
    if len(sites) != len(bases):
        raise DomainError("one basis per measured site")
    if len(sites) >= state.num_sites:
        raise DomainError("at least one site must stay unmeasured")

    rotated = state
    for site, basis in zip(sites, bases):
        rotated = apply_product_unitary(rotated, UnitaryMatrix(as_matrix(basis)).dagger, sites=[site])

    rest = [s for s in range(state.num_sites) if s not in sites]
    tensor = np.transpose(rotated.tensor(), sites + rest)
    rows = tensor.reshape(state.local_dim ** len(sites), -1)
    probabilities = np.sum(np.abs(rows) ** 2, axis=1)

    for index in np.flatnonzero(probabilities > BRANCH_CUTOFF):
        outcomes = tuple(decode_index(int(index), len(sites), state.local_dim)) if sites else ()
        remaining = StateVector(len(rest), state.local_dim, rows[index] / np.sqrt(probabilities[index]))
        yield Branch(outcomes, float(probabilities[index]), remaining)


def reck_factorize(unitary):
    """Two-level factorisation by eliminating sub-diagonal entries column by column"""
    matrix = as_matrix(unitary)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {matrix.shape}")
    if unitarity_deviation(matrix) > 1e-10:
        raise ValidationError("input is not unitary")

    dim = matrix.shape[0]
    work = np.array(matrix, dtype=complex)
    factors = []
    for col in range(dim - 1):
        for row in range(dim - 1, col, -1):
            a, b = work[col, col], work[row, col]
            if abs(b) <= SKIP_TOL:
                continue
            norm = np.hypot(abs(a), abs(b))
            # G zeroes work[row, col] using rows (col, row)
            g = np.array([[a.conjugate(), b.conjugate()], [-b, a]]) / norm
            work[[col, row], :] = g @ work[[col, row], :]
            factors.append(TwoLevelFactor((col, row), g.conj().T))

    return ReckDecomposition(dim, factors, np.diag(work).copy())


def is_subspace_compatible(factors, singlet_levels):
    """True iff every factor acts entirely inside or entirely outside singlet_levels"""
    support = set(singlet_levels)
    for factor in factors:
        levels = set(factor.levels)
        if levels & support and not levels <= support:
            return False
    return True


def subspace_rotation_check(spec, unitary):
    """Apply U^{(x)n} to an embedded singlet; report invariance and residual antisymmetry"""
    singlet = build_singlet(spec)
    rotated = apply_product_unitary(singlet, unitary)
    decomposition = reck_factorize(unitary)
    return {
        'compatible': is_subspace_compatible(decomposition.factors, spec.occupied_levels),
        'fidelity': fidelity_up_to_phase(rotated, singlet),
        'invariance_deviation': check_rotation_invariance(singlet, unitary),
        'antisymmetry_deviation': max_swap_deviation(rotated),
    }
