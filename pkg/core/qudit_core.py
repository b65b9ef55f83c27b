"""State algebra over tensor products of d-level systems

Sites are 0-based in the library; site 0 is the most significant base-d
digit of the flat amplitude index. Every module shares this convention.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import numpy as np

from core.errors import DomainError, NumericalError, ValidationError

NORM_TOL = 1e-10
UNITARY_TOL = 1e-10
RANK_TOL = 1e-10
MAX_DIMENSION = 10 ** 6


@dataclass(frozen=True, eq=False)
class StateVector:
    """Dense complex amplitude vector over num_sites qudits of dimension local_dim"""

    num_sites: int
    local_dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.num_sites < 1 or self.local_dim < 1:
            raise DomainError(f"need positive sizes, got n={self.num_sites}, d={self.local_dim}")
        if self.local_dim ** self.num_sites > MAX_DIMENSION:
            raise DomainError(f"d^n = {self.local_dim}^{self.num_sites} exceeds {MAX_DIMENSION}")
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size != self.local_dim ** self.num_sites:
            raise DomainError(
                f"expected {self.local_dim ** self.num_sites} amplitudes, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amps)

    @property
    def dim(self):
        return self.amplitudes.size

    @property
    def shape(self):
        return (self.local_dim,) * self.num_sites

    def tensor(self):
        """Amplitudes as an n-index tensor, one axis per site"""
        return self.amplitudes.reshape(self.shape)

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        norm = self.norm()
        if norm < 1e-14:
            raise NumericalError("cannot normalize a zero vector")
        return self.with_amplitudes(self.amplitudes / norm)

    def with_amplitudes(self, amplitudes):
        """Same register, new amplitudes"""
        return StateVector(self.num_sites, self.local_dim, amplitudes)

    @classmethod
    def from_tensor(cls, tensor):
        tensor = np.asarray(tensor)
        if tensor.ndim == 0:
            raise DomainError("a state needs at least one site")
        return cls(tensor.ndim, tensor.shape[0], tensor.ravel())


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """d x d unitary; its columns are the measurement basis vectors U|i>"""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise ValidationError(f"unitary must be a non-empty square matrix, got shape {entries.shape}")
        deviation = unitarity_deviation(entries)
        if deviation > UNITARY_TOL:
            raise ValidationError(f"matrix is not unitary (max |U†U - 1| = {deviation:.3e})")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def dagger(self):
        return UnitaryMatrix(self.entries.conj().T)

    def column(self, level):
        """Basis vector U|level>"""
        return self.entries[:, level]

    def is_identity(self):
        return bool(np.array_equal(self.entries, np.eye(self.dim)))

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim, dtype=complex))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Reduced state of a set of sites"""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if np.max(np.abs(entries - entries.conj().T)) > NORM_TOL:
            raise NumericalError("density matrix is not Hermitian")
        if abs(np.trace(entries) - 1.0) > NORM_TOL:
            raise NumericalError(f"density matrix trace {np.trace(entries).real:.12f} != 1")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def dim(self):
        return self.entries.shape[0]

    def eigenvalues(self):
        """Descending eigenvalues, tiny negatives clipped to zero"""
        values = np.linalg.eigvalsh(self.entries)[::-1]
        if values[-1] < -NORM_TOL:
            raise NumericalError(f"negative eigenvalue {values[-1]:.3e}")
        return np.clip(values, 0.0, None)

    def purity(self):
        return float(np.real(np.trace(self.entries @ self.entries)))

    def rank(self, tol=RANK_TOL):
        return int(np.count_nonzero(self.eigenvalues() > tol))


@dataclass(frozen=True)
class Bipartition:
    """Split of the sites into two non-empty complementary blocks"""

    block_a: tuple
    block_b: tuple

    @classmethod
    def of(cls, block_a, num_sites):
        block_a = tuple(sorted(set(int(s) for s in block_a)))
        if not block_a or len(block_a) >= num_sites:
            raise DomainError(f"block {block_a} is not a proper non-empty subset of {num_sites} sites")
        if block_a[0] < 0 or block_a[-1] >= num_sites:
            raise DomainError(f"block {block_a} out of range for {num_sites} sites")
        block_b = tuple(s for s in range(num_sites) if s not in block_a)
        return cls(block_a, block_b)

    def swapped(self):
        return Bipartition(self.block_b, self.block_a)


class SchmidtDecomposition(NamedTuple):
    coefficients: np.ndarray
    rank: int


def unitarity_deviation(matrix):
    """Max-entry deviation of U†U from the identity"""
    matrix = np.asarray(matrix)
    return float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))))


def as_matrix(operator):
    """Accept UnitaryMatrix or a raw square array"""
    if isinstance(operator, UnitaryMatrix):
        return operator.entries
    return np.asarray(operator, dtype=complex)


def encode_index(digits, d):
    """Flat index of a per-site level list; site 0 is the most significant digit"""
    digits = list(digits)
    if not digits:
        raise DomainError("digit list must be non-empty")
    index = 0
    for digit in digits:
        if not 0 <= digit < d:
            raise DomainError(f"digit {digit} out of range [0, {d})")
        index = index * d + int(digit)
    return index


def decode_index(index, num_sites, d):
    """Inverse of encode_index"""
    if not 0 <= index < d ** num_sites:
        raise DomainError(f"index {index} out of range for {num_sites} sites of dimension {d}")
    digits = []
    for _ in range(num_sites):
        index, digit = divmod(index, d)
        digits.append(digit)
    return digits[::-1]


def _check_site(state, site):
    if not 0 <= site < state.num_sites:
        raise DomainError(f"site {site} out of range for {state.num_sites} sites")


def apply_local_operator(state, site, operator):
    """Apply a d x d matrix at one site (no unitarity requirement)"""
    _check_site(state, site)
    matrix = as_matrix(operator)
    if matrix.shape != (state.local_dim, state.local_dim):
        raise DomainError(f"operator shape {matrix.shape} does not match local dimension {state.local_dim}")
    moved = np.tensordot(matrix, state.tensor(), axes=([1], [site]))
    return StateVector.from_tensor(np.moveaxis(moved, 0, site))


def apply_local_unitary(state, site, unitary):
    """U acting on one site, identity elsewhere"""
    if as_matrix(unitary).shape[0] != state.local_dim:
        raise DomainError(f"unitary dimension {as_matrix(unitary).shape[0]} != local dimension {state.local_dim}")
    return apply_local_operator(state, site, unitary)


def apply_product_unitary(state, unitary, sites=None):
    """U at every listed site (all sites by default)"""
    sites = range(state.num_sites) if sites is None else sites
    for site in sites:
        state = apply_local_unitary(state, site, unitary)
    return state


def apply_swap(state, i, j):
    """Permutation operator P_ij exchanging the states of sites i and j"""
    _check_site(state, i)
    _check_site(state, j)
    if i == j:
        raise DomainError("swap needs two distinct sites")
    return StateVector.from_tensor(np.swapaxes(state.tensor(), i, j))


def swap_deviation(state, i, j):
    """||P_ij|psi> + |psi>||, zero iff the state is antisymmetric under the exchange"""
    return float(np.linalg.norm(apply_swap(state, i, j).amplitudes + state.amplitudes))


def max_swap_deviation(state, sites=None):
    """Largest swap_deviation over every pair drawn from sites"""
    sites = range(state.num_sites) if sites is None else sorted(sites)
    deviations = [swap_deviation(state, i, j) for i, j in combinations(sites, 2)]
    return max(deviations, default=0.0)


def _block_matrix(state, block):
    """Amplitudes reshaped to (block dimension, rest dimension)"""
    block = list(block)
    rest = [s for s in range(state.num_sites) if s not in block]
    tensor = np.transpose(state.tensor(), block + rest)
    return tensor.reshape(state.local_dim ** len(block), -1)


def partial_trace(state, keep):
    """Reduced density matrix of the kept sites (in ascending site order)"""
    keep = sorted(set(keep))
    if not keep or len(keep) >= state.num_sites:
        raise DomainError(f"keep set {keep} must be a non-empty proper subset of {state.num_sites} sites")
    for site in keep:
        _check_site(state, site)
    matrix = _block_matrix(state.normalized(), keep)
    return DensityMatrix(matrix @ matrix.conj().T)


def schmidt(state, cut, rank_tol=RANK_TOL):
    """Schmidt coefficients (non-increasing) and rank across a bipartition"""
    matrix = _block_matrix(state.normalized(), cut.block_a)
    coefficients = np.linalg.svd(matrix, compute_uv=False)
    return SchmidtDecomposition(coefficients, int(np.count_nonzero(coefficients > rank_tol)))


def entropy(coefficients):
    """Entanglement entropy in bits from Schmidt coefficients"""
    weights = np.asarray(coefficients, dtype=float) ** 2
    weights = weights[weights > 0]
    return max(0.0, float(-np.sum(weights * np.log2(weights))))


def fidelity_up_to_phase(a, b):
    """|<a|b>| for normalized inputs, insensitive to global phase"""
    if a.dim != b.dim or a.local_dim != b.local_dim:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    overlap = abs(np.vdot(a.amplitudes, b.amplitudes)) / (a.norm() * b.norm())
    return float(min(1.0, overlap))


def phase_aligned_distance(a, b):
    """min over phi of ||a - e^{i phi} b||"""
    if a.dim != b.dim:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    overlap = np.vdot(b.amplitudes, a.amplitudes)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(a.amplitudes - phase * b.amplitudes))


def conditional_state(state, site, vector):
    """Normalized state of the other sites after projecting `site` onto `vector`"""
    _check_site(state, site)
    if state.num_sites < 2:
        raise DomainError("conditioning needs at least two sites")
    vector = np.asarray(vector, dtype=complex)
    reduced = np.tensordot(vector.conj(), state.tensor(), axes=([0], [site]))
    norm = np.linalg.norm(reduced)
    if norm < 1e-14:
        raise NumericalError(f"projection at site {site} has zero weight")
    return StateVector.from_tensor(reduced / norm)


def basis_state(levels, d):
    """Computational product state |l_0 l_1 ...>"""
    amplitudes = np.zeros(d ** len(levels), dtype=complex)
    amplitudes[encode_index(levels, d)] = 1.0
    return StateVector(len(levels), d, amplitudes)


def product_state(vectors):
    """Tensor product of single-site vectors"""
    vectors = [np.asarray(v, dtype=complex) for v in vectors]
    amplitudes = vectors[0]
    for vector in vectors[1:]:
        amplitudes = np.kron(amplitudes, vector)
    return StateVector(len(vectors), vectors[0].size, amplitudes).normalized()


def random_state(num_sites, d, rng):
    """Haar-random pure state (normalized complex Gaussian vector)"""
    size = d ** num_sites
    amplitudes = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return StateVector(num_sites, d, amplitudes).normalized()
