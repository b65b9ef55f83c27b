"""Permutation Hamiltonian H = sum_{(i,j) in E(G)} J_ij P_ij and its low spectrum"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from core.errors import ConvergenceError, DomainError, PreconditionError
from core.network import is_connected, shortest_path
from core.qudit_core import (StateVector, apply_local_unitary, apply_swap,
                             max_swap_deviation, random_state)

DENSE_LIMIT = 4096
RITZ_COUNT = 4
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass
class SpectrumResult:
    """Lowest energies, a ground state, its degeneracy and the gap above it"""

    lowest_energies: list
    ground_state: StateVector
    degeneracy: int
    gap: float
    method: str = 'dense'
    iterations: int = 0
    threshold: float = 0.0

    @property
    def ground_energy(self):
        return self.lowest_energies[0]


class PermutationOperator:
    """Implicit H on n sites of dimension d; each P_ij is an index permutation"""

    def __init__(self, net, d):
        if d < 1:
            raise DomainError(f"local dimension must be positive, got {d}")
        self.net = net
        self.d = d
        self.num_sites = net.num_vertices
        self.dim = d ** self.num_sites
        grid = np.arange(self.dim).reshape((d,) * self.num_sites)
        # (P_ij psi)[r] = psi[perm[r]]
        self.terms = [
            (coupling, np.swapaxes(grid, i - 1, j - 1).ravel())
            for i, j, coupling in net.edges
        ]

    def matvec(self, vector):
        out = np.zeros_like(vector)
        for coupling, perm in self.terms:
            out += coupling * vector[perm]
        return out

    def to_dense(self):
        """Real symmetric matrix; only used below the dense limit"""
        matrix = np.zeros((self.dim, self.dim))
        rows = np.arange(self.dim)
        for coupling, perm in self.terms:
            matrix[rows, perm] += coupling
        return matrix


class LanczosEngine:
    """Lanczos with full reorthogonalisation; degenerate levels resolved by deflation

    Each requested level is a fresh Lanczos run whose Krylov space is kept
    orthogonal to every vector already converged, so a degenerate ground
    space is reported once per independent vector.
    """

    def __init__(self, matvec, dim, tol=1e-10, max_iter=300, seed=0, check_every=5):
        self.matvec = matvec
        self.dim = dim
        self.tol = tol
        self.max_iter = max_iter
        self.rng = np.random.default_rng(seed)
        self.check_every = check_every
        self.iterations = 0

    @staticmethod
    def _project_out(vector, locked):
        for other in locked:
            vector -= np.dot(other, vector) * other
        return vector

    def _run(self, locked):
        start = self._project_out(self.rng.standard_normal(self.dim), locked)
        start /= np.linalg.norm(start)
        basis = [start]
        alphas, betas = [], []

        for it in range(1, self.max_iter + 1):
            w = self._project_out(self.matvec(basis[-1]), locked)
            alphas.append(float(np.dot(basis[-1], w)))
            # Full reorthogonalisation, applied twice
            for _ in range(2):
                for v in basis:
                    w -= np.dot(v, w) * v
                self._project_out(w, locked)
            beta = float(np.linalg.norm(w))

            exhausted = beta < 1e-12 or len(basis) + len(locked) >= self.dim
            if exhausted or it % self.check_every == 0 or it == self.max_iter:
                values, vectors = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas))
                residual = abs(beta * vectors[-1, 0])
                if exhausted or residual < self.tol * max(1.0, abs(values[0])):
                    self.iterations += it
                    ritz = np.array(basis).T @ vectors[:, 0]
                    return float(values[0]), ritz / np.linalg.norm(ritz)

            betas.append(beta)
            basis.append(w / beta)

        self.iterations += self.max_iter
        raise ConvergenceError(
            f"Lanczos residual {residual:.3e} above tolerance {self.tol:.1e}", self.iterations)

    def lowest(self, k):
        """k lowest eigenpairs, ascending"""
        locked, values = [], []
        for _ in range(min(k, self.dim)):
            value, vector = self._run(locked)
            values.append(value)
            locked.append(vector)
        order = np.argsort(values)
        slack = 10 * self.tol * max(1.0, max(abs(v) for v in values))
        if any(later < earlier - slack for earlier, later in zip(values, values[1:])):
            warnings.warn("deflated Lanczos levels came out of order; re-sorting", RuntimeWarning)
        return [values[o] for o in order], [locked[o] for o in order]


def _check_state(net, d, state):
    if state.num_sites != net.num_vertices or state.local_dim != d:
        raise DomainError(
            f"state has {state.num_sites} sites of dimension {state.local_dim}; "
            f"network needs {net.num_vertices} of dimension {d}")


def hamiltonian_matvec(net, d, state):
    """H|psi> for H = sum J_ij P_ij"""
    _check_state(net, d, state)
    return state.with_amplitudes(PermutationOperator(net, d).matvec(np.array(state.amplitudes)))


def energy_expectation(net, d, state):
    """<psi|H|psi> / <psi|psi>"""
    hpsi = hamiltonian_matvec(net, d, state)
    return float(np.real(np.vdot(state.amplitudes, hpsi.amplitudes)) / state.norm() ** 2)


def degeneracy_threshold(net, tol):
    """Levels within this distance of E0 count as degenerate"""
    return max(10 * tol, 1e-8 * net.total_coupling)


def ground_state(net, d, k=RITZ_COUNT, tol=1e-10, dense_limit=DENSE_LIMIT, max_iter=300, seed=0):
    """Low spectrum of H: dense eigensolve up to dense_limit, deflated Lanczos above"""
    if not is_connected(net):
        raise PreconditionError("ground_state requires a connected network")
    if d < 2:
        raise DomainError(f"local dimension must be at least 2, got {d}")
    if k < 2:
        raise DomainError(f"need at least 2 levels to measure a gap, got k={k}")

    operator = PermutationOperator(net, d)
    k = min(k, operator.dim)
    if operator.dim <= dense_limit:
        values, vectors = scipy.linalg.eigh(operator.to_dense(), subset_by_index=[0, k - 1])
        energies = [float(v) for v in values]
        ground = vectors[:, 0]
        method, iterations = 'dense', 0
    else:
        engine = LanczosEngine(operator.matvec, operator.dim, tol=tol, max_iter=max_iter, seed=seed)
        energies, vectors = engine.lowest(k)
        ground = vectors[0]
        method, iterations = 'lanczos', engine.iterations

    threshold = degeneracy_threshold(net, tol)
    degeneracy = sum(1 for e in energies if e - energies[0] <= threshold)
    gap = energies[degeneracy] - energies[0] if degeneracy < len(energies) else 0.0

    return SpectrumResult(
        lowest_energies=energies,
        ground_state=StateVector(net.num_vertices, d, ground).normalized(),
        degeneracy=degeneracy,
        gap=float(gap),
        method=method,
        iterations=iterations,
        threshold=threshold,
    )


def verify_all_pair_eigenstate(state, net):
    """max over ALL pairs i < j (edges or not) of ||P_ij|psi> + |psi>||"""
    if state.num_sites != net.num_vertices:
        raise DomainError(f"state has {state.num_sites} sites, network {net.num_vertices}")
    return max_swap_deviation(state)


def edge_swap_expectations(state, net):
    """<P_ij> on every edge, keyed by (i, j)"""
    return {
        (i, j): float(np.real(np.vdot(state.amplitudes, apply_swap(state, i - 1, j - 1).amplitudes)))
        for i, j, _ in net.edges
    }


def sampled_energy_minimum(net, d, samples, rng):
    """Lowest <H> over Haar-random states; never below -sum J"""
    return min(energy_expectation(net, d, random_state(net.num_vertices, d, rng)) for _ in range(samples))


def transposition_path(net, i, j):
    """Edges whose swaps multiply to P_ij (odd-length palindrome along a shortest path)"""
    path = shortest_path(net, i, j)
    if path is None:
        raise PreconditionError(f"vertices {i} and {j} are not connected")
    steps = [(min(a, b), max(a, b)) for a, b in zip(path, path[1:])]
    return steps[:-1] + [steps[-1]] + steps[-2::-1]


def verify_transposition_path(net, i, j, state):
    """Max-abs difference between P_ij|psi> and the product of path swaps"""
    direct = apply_swap(state, i - 1, j - 1)
    composed = state
    for a, b in transposition_path(net, i, j):
        composed = apply_swap(composed, a - 1, b - 1)
    return float(np.max(np.abs(direct.amplitudes - composed.amplitudes)))


def heisenberg_deviation(state, i, j):
    """Max-abs difference between P_ij and (1 + sigma_i . sigma_j)/2 on a qubit state"""
    if state.local_dim != 2:
        raise DomainError("the Heisenberg identity holds for qubits only")
    exchange = np.array(state.amplitudes)
    for pauli in PAULI:
        exchange = exchange + apply_local_unitary(apply_local_unitary(state, i, pauli), j, pauli).amplitudes
    exchange /= 2
    return float(np.max(np.abs(exchange - apply_swap(state, i, j).amplitudes)))
