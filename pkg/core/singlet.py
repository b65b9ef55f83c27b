"""N-singlets and reduced singlets with excluded levels in rotated bases"""

from dataclasses import dataclass, field
from itertools import permutations
from math import factorial, sqrt

import numpy as np

from core.errors import DomainError
from core.qudit_core import (StateVector, UnitaryMatrix, apply_local_unitary,
                             apply_product_unitary, encode_index, fidelity_up_to_phase,
                             phase_aligned_distance, product_state)


@dataclass(frozen=True, eq=False)
class SingletSpec:
    """n parties, local dimension d >= n, basis columns {|beta_i>}, d - n excluded levels"""

    n_parties: int
    local_dim: int
    basis: UnitaryMatrix = None
    excluded_levels: tuple = field(default=())

    def __post_init__(self):
        if self.n_parties < 1:
            raise DomainError(f"need at least one party, got {self.n_parties}")
        if self.local_dim < self.n_parties:
            raise DomainError(f"local dimension {self.local_dim} < {self.n_parties} parties")
        excluded = tuple(sorted(set(int(level) for level in self.excluded_levels)))
        if any(not 0 <= level < self.local_dim for level in excluded):
            raise DomainError(f"excluded levels {excluded} outside [0, {self.local_dim})")
        if len(excluded) != self.local_dim - self.n_parties:
            raise DomainError(
                f"need exactly {self.local_dim - self.n_parties} excluded levels, got {len(excluded)}")
        basis = self.basis if self.basis is not None else UnitaryMatrix.identity(self.local_dim)
        if basis.dim != self.local_dim:
            raise DomainError(f"basis dimension {basis.dim} != local dimension {self.local_dim}")
        object.__setattr__(self, 'excluded_levels', excluded)
        object.__setattr__(self, 'basis', basis)

    @property
    def occupied_levels(self):
        return tuple(level for level in range(self.local_dim) if level not in self.excluded_levels)


def levi_civita_sign(perm):
    """+1 for even, -1 for odd permutations (inversion count)"""
    inversions = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
    return -1 if inversions % 2 else 1


def build_singlet(spec):
    """Antisymmetrize the occupied levels, then rotate every site into the basis"""
    n, d = spec.n_parties, spec.local_dim
    occupied = spec.occupied_levels

    if n == 1:
        return product_state([spec.basis.column(occupied[0])])

    amplitudes = np.zeros(d ** n, dtype=complex)
    weight = 1.0 / sqrt(factorial(n))
    for perm in permutations(range(n)):
        digits = [occupied[p] for p in perm]
        amplitudes[encode_index(digits, d)] = levi_civita_sign(perm) * weight

    state = StateVector(n, d, amplitudes)
    if not spec.basis.is_identity():
        state = apply_product_unitary(state, spec.basis)
    return state


def full_singlet(n, basis=None):
    """The N-singlet of n n-level systems"""
    return build_singlet(SingletSpec(n, n, basis))


def check_rotation_invariance(state, unitary):
    """1 - fidelity between U^{(x)n}|S> and |S>"""
    rotated = apply_product_unitary(state, unitary)
    return 1.0 - fidelity_up_to_phase(rotated, state)


def one_site_expansion(n):
    """Norm of |S_n> - (1/sqrt n) sum_i (-1)^i |alpha_i> (x) |S_{n-1}(alpha; alpha_i)>"""
    if not 2 <= n <= 6:
        raise DomainError(f"expansion check supports 2 <= n <= 6, got {n}")
    target = full_singlet(n)

    amplitudes = np.zeros(n ** n, dtype=complex)
    for level in range(n):
        head = np.zeros(n, dtype=complex)
        head[level] = 1.0
        tail = build_singlet(SingletSpec(n - 1, n, excluded_levels=(level,)))
        amplitudes += (-1) ** level * np.kron(head, tail.amplitudes)
    amplitudes /= sqrt(n)

    return float(np.linalg.norm(target.amplitudes - amplitudes))


def agrawal_property_check(n, unitary):
    """Distance between (U (x) 1)|S> and (1 (x) U†^{(x)n-1})|S>

    The two sides differ by the global phase det(U), so the distance is
    taken after phase alignment.
    """
    if unitary.dim != n:
        raise DomainError(f"unitary dimension {unitary.dim} != {n}")
    singlet = full_singlet(n)
    lhs = apply_local_unitary(singlet, 0, unitary)
    rhs = apply_product_unitary(singlet, unitary.dagger, sites=range(1, n))
    return phase_aligned_distance(lhs, rhs)
