"""d-species fermionic Hubbard model at 1/d filling and its exchange limit

Each species carries a single particle, so a configuration is the tuple of
sites occupied by species 0..d-1. Fermionic modes are ordered site-major,
species-minor (mode = site * d + species).
"""

from dataclasses import dataclass, field
from itertools import permutations, product
from math import factorial

import numpy as np
import scipy.linalg

from core.errors import DomainError, RegimeError, ValidationError
from core.network import make_topology

MAX_RATIO = 0.05
SUPPORTED_SPECIES = (2, 3, 4)


@dataclass(frozen=True)
class FockSector:
    """One particle per species on num_sites sites"""

    num_sites: int
    num_species: int
    basis: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        configs = tuple(product(range(self.num_sites), repeat=self.num_species))
        object.__setattr__(self, 'basis', configs)
        object.__setattr__(self, '_index', {config: k for k, config in enumerate(configs)})

    @property
    def dim(self):
        return len(self.basis)

    @property
    def mode_order(self):
        """(site, species) pairs in canonical mode order"""
        return [(site, species) for site in range(self.num_sites) for species in range(self.num_species)]

    def mode(self, site, species):
        return site * self.num_species + species

    def index(self, config):
        return self._index[tuple(config)]

    def occupied_modes(self, config):
        return sorted(self.mode(site, species) for species, site in enumerate(config))

    def is_singly_occupied(self, config):
        return len(set(config)) == len(config)

    def to_dict(self):
        return {
            'num_sites': self.num_sites,
            'num_species': self.num_species,
            'mode_order': [list(pair) for pair in self.mode_order],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            sector = cls(int(data['num_sites']), int(data['num_species']))
        except (KeyError, TypeError) as e:
            raise ValidationError(f"malformed sector: {e}") from e
        if [tuple(pair) for pair in data.get('mode_order', sector.mode_order)] != sector.mode_order:
            raise ValidationError("mode_order is not the canonical site-major ordering")
        return sector


@dataclass
class EffectiveComparison:
    t: float
    U: float
    J_expected: float
    hubbard_low_levels: list
    perm_levels: list
    max_relative_gap_error: float
    separation: float = 0.0
    bound: float = 0.0

    def to_dict(self):
        return {
            't': self.t,
            'U': self.U,
            'J_expected': self.J_expected,
            'hubbard_low_levels': self.hubbard_low_levels,
            'perm_levels': self.perm_levels,
            'max_relative_gap_error': self.max_relative_gap_error,
            'separation': self.separation,
            'bound': self.bound,
        }


def enumerate_sector(num_sites, d):
    """Configurations of d distinguishable species, one particle each"""
    if d not in SUPPORTED_SPECIES or num_sites != d:
        raise DomainError(f"supported sectors are num_sites = d in {SUPPORTED_SPECIES}, got ({num_sites}, {d})")
    return FockSector(num_sites, d)


def hop_sign(occupied, source, target):
    """(-1)^(occupied modes strictly between source and target)"""
    low, high = min(source, target), max(source, target)
    return -1 if sum(1 for m in occupied if low < m < high) % 2 else 1


def build_hubbard(net, t_scale, U, sector):
    """Dense Hubbard matrix with hop amplitude -t_scale * J_edge and U per same-site species pair"""
    if t_scale < 0:
        raise DomainError(f"t must be non-negative, got {t_scale}")
    if not U > 0:
        raise DomainError(f"U must be positive, got {U}")
    if net.num_vertices != sector.num_sites:
        raise DomainError(f"network has {net.num_vertices} sites, sector {sector.num_sites}")

    d = sector.num_species
    matrix = np.zeros((sector.dim, sector.dim))
    adjacency = {}
    for i, j, coupling in net.edges:
        # Network vertices are 1-based
        adjacency.setdefault(i - 1, []).append((j - 1, coupling))
        adjacency.setdefault(j - 1, []).append((i - 1, coupling))

    for col, config in enumerate(sector.basis):
        pairs = sum(1 for a in range(d) for b in range(a + 1, d) if config[a] == config[b])
        matrix[col, col] = U * pairs
        if t_scale == 0:
            continue
        occupied = sector.occupied_modes(config)
        for species, site in enumerate(config):
            for other, coupling in adjacency.get(site, []):
                target = list(config)
                target[species] = other
                sign = hop_sign(occupied, sector.mode(site, species), sector.mode(other, species))
                matrix[sector.index(target), col] += -t_scale * coupling * sign
    return matrix


def species_number_operator(sector, species, site=None):
    """Diagonal of n_{species} at one site, or summed over sites

    Summed over sites this is the identity on the sector: each species has
    exactly one particle in every configuration.
    """
    if not 0 <= species < sector.num_species:
        raise DomainError(f"species {species} out of range")
    if site is None:
        return np.ones(sector.dim)
    return np.array([1.0 if config[species] == site else 0.0 for config in sector.basis])


def illegal_hop_weight(matrix, sector, net):
    """Largest |H_ab| off the diagonal that no single hop along an edge explains

    A hop moves exactly one species to a neighbouring site, so every other
    nonzero entry breaks conservation of some species number.
    """
    bonds = {(i - 1, j - 1) for i, j, _ in net.edges}
    bonds |= {(j, i) for i, j in bonds}
    worst = 0.0
    for row, col in zip(*np.nonzero(matrix)):
        if row == col:
            continue
        before, after = sector.basis[col], sector.basis[row]
        moved = [s for s in range(sector.num_species) if before[s] != after[s]]
        if len(moved) == 1 and (before[moved[0]], after[moved[0]]) in bonds:
            continue
        worst = max(worst, float(abs(matrix[row, col])))
    return worst


def two_site_ground_energy(t, U):
    """Closed form (U - sqrt(U^2 + 16 t^2)) / 2"""
    return (U - np.sqrt(U ** 2 + 16 * t ** 2)) / 2


def effective_permutation_levels(net, d, J):
    """Spectrum of sum (J_edge J / 2)(P_ij - 1) on the d! one-of-each-species states"""
    configs = list(permutations(range(d)))
    index = {config: k for k, config in enumerate(configs)}
    matrix = np.zeros((len(configs), len(configs)))
    for col, config in enumerate(configs):
        for i, j, coupling in net.edges:
            swapped = list(config)
            # config[species] = site; swapping sites i and j relabels the two occupants
            for species, site in enumerate(config):
                if site == i - 1:
                    swapped[species] = j - 1
                elif site == j - 1:
                    swapped[species] = i - 1
            weight = coupling * J / 2
            matrix[index[tuple(swapped)], col] += weight
            matrix[col, col] -= weight
    return scipy.linalg.eigvalsh(matrix)


def compare_effective(num_sites, d, t, U, max_ratio=MAX_RATIO):
    """Hubbard low-manifold spacings against the exchange model with J = 4t^2/U on a chain"""
    if not t > 0 or not U > 0:
        raise DomainError(f"need t > 0 and U > 0, got t={t}, U={U}")
    ratio = t / U
    if ratio > max_ratio:
        raise RegimeError(f"t/U = {ratio:.4g} exceeds the perturbative limit {max_ratio}", ratio)

    sector = enumerate_sector(num_sites, d)
    net = make_topology('chain', num_sites)
    levels = scipy.linalg.eigvalsh(build_hubbard(net, t, U, sector))
    size = factorial(d)
    separation = float(levels[size] - levels[size - 1])
    if separation < U / 2:
        raise RegimeError(
            f"low manifold separated by {separation:.4g} < U/2 = {U / 2:.4g}", ratio, separation)

    J = 4 * t ** 2 / U
    hubbard_low = levels[:size] - levels[0]
    perm = effective_permutation_levels(net, d, J)
    perm = perm - perm[0]

    errors = []
    for h, p in zip(hubbard_low[1:], perm[1:]):
        scale = p if p > 1e-9 * J else J
        errors.append(abs(h - p) / scale)

    return EffectiveComparison(
        t=float(t), U=float(U), J_expected=J,
        hubbard_low_levels=[float(v) for v in hubbard_low],
        perm_levels=[float(v) for v in perm],
        max_relative_gap_error=float(max(errors, default=0.0)),
        separation=separation,
        bound=16 * ratio ** 2,
    )


def gap_scaling_fit(U, t_values, max_ratio=MAX_RATIO):
    """Log-log least squares of the two-species low gap against t: (exponent, prefactor)"""
    t_values = [float(t) for t in t_values]
    if len(t_values) < 2:
        raise DomainError("need at least two t values for a fit")
    gaps = [compare_effective(2, 2, t, U, max_ratio).hubbard_low_levels[1] for t in t_values]
    exponent, intercept = np.polyfit(np.log(t_values), np.log(gaps), 1)
    return float(exponent), float(np.exp(intercept))
