"""Qudit network G = {V(G), E(G)} with antiferromagnetic couplings

Vertices are 1-based here, as in the JSON schema
{"num_qudits": N, "edges": [[i, j, J], ...]}.
"""

import json
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from core.errors import DomainError, ValidationError

TOPOLOGIES = ('chain', 'ring', 'star', 'complete', 'random_connected')


@dataclass(frozen=True)
class QuditNetwork:
    """Vertex count plus normalized edge list (i < j, sorted, J > 0)"""

    num_vertices: int
    edges: tuple = ()
    # Only the sign guard test turns this off
    require_positive: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.num_vertices, (int, np.integer)) or self.num_vertices < 1:
            raise ValidationError(f"num_qudits must be a positive integer, got {self.num_vertices!r}")

        normalized = {}
        for edge in self.edges:
            if len(edge) != 3:
                raise ValidationError(f"edge {edge!r} must be [i, j, J]")
            i, j, coupling = int(edge[0]), int(edge[1]), float(edge[2])
            if i == j:
                raise ValidationError(f"self-loop on vertex {i}")
            i, j = min(i, j), max(i, j)
            if i < 1 or j > self.num_vertices:
                raise ValidationError(f"edge ({i}, {j}) out of range 1..{self.num_vertices}")
            if self.require_positive and not coupling > 0:
                raise ValidationError(f"antiferromagnetic required: J({i},{j}) = {coupling} <= 0")
            if (i, j) in normalized:
                raise ValidationError(f"duplicate edge ({i}, {j})")
            normalized[(i, j)] = coupling

        edges = tuple((i, j, coupling) for (i, j), coupling in sorted(normalized.items()))
        object.__setattr__(self, 'num_vertices', int(self.num_vertices))
        object.__setattr__(self, 'edges', edges)

    @property
    def total_coupling(self):
        """Sum of J_ij; the ground energy is minus this for d = N"""
        return float(sum(coupling for _, _, coupling in self.edges))

    def neighbours(self):
        """Adjacency lists keyed by 1-based vertex"""
        adjacency = {v: [] for v in range(1, self.num_vertices + 1)}
        for i, j, _ in self.edges:
            adjacency[i].append(j)
            adjacency[j].append(i)
        return adjacency

    def with_couplings(self, couplings):
        """Same graph, new coupling per edge (in edge order)"""
        edges = [(i, j, coupling) for (i, j, _), coupling in zip(self.edges, couplings)]
        return QuditNetwork(self.num_vertices, tuple(edges), self.require_positive)

    def to_dict(self):
        return {
            'num_qudits': self.num_vertices,
            'edges': [[i, j, coupling] for i, j, coupling in self.edges],
        }


def serialize_network(net):
    """JSON text in the network schema"""
    return json.dumps(net.to_dict())


def parse_network(text):
    """Parse and normalize the network JSON schema"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"network is not valid JSON: {e}") from e

    if not isinstance(data, dict):
        raise ValidationError("network must be a JSON object")
    unknown = set(data) - {'num_qudits', 'edges'}
    if unknown:
        raise ValidationError(f"unknown network keys: {sorted(unknown)}")
    if 'num_qudits' not in data:
        raise ValidationError("network needs 'num_qudits'")
    if not isinstance(data.get('edges', []), list):
        raise ValidationError("'edges' must be a list")
    return QuditNetwork(data['num_qudits'], tuple(tuple(e) for e in data.get('edges', [])))


def load_network(path):
    """Read a network file"""
    with open(Path(path), 'r', encoding='utf-8') as f:
        return parse_network(f.read())


def reachable(net, start=1):
    """Vertices reachable from start (breadth-first)"""
    adjacency = net.neighbours()
    seen = {start}
    queue = deque([start])
    while queue:
        vertex = queue.popleft()
        for other in adjacency[vertex]:
            if other not in seen:
                seen.add(other)
                queue.append(other)
    return seen


def is_connected(net):
    """True iff one component spans all vertices"""
    return len(reachable(net)) == net.num_vertices


def shortest_path(net, source, target):
    """Vertex path from source to target (breadth-first), None if unreachable"""
    adjacency = net.neighbours()
    parents = {source: None}
    queue = deque([source])
    while queue:
        vertex = queue.popleft()
        if vertex == target:
            break
        for other in adjacency[vertex]:
            if other not in parents:
                parents[other] = vertex
                queue.append(other)
    if target not in parents:
        return None
    path = [target]
    while parents[path[-1]] is not None:
        path.append(parents[path[-1]])
    return path[::-1]


def _random_tree(n, rng):
    """Uniform labelled spanning tree of K_n from a random Prüfer sequence"""
    if n == 2:
        return [(1, 2)]
    sequence = [int(v) for v in rng.integers(1, n + 1, size=n - 2)]
    degree = [1] * (n + 1)
    for vertex in sequence:
        degree[vertex] += 1
    edges = []
    for vertex in sequence:
        leaf = next(v for v in range(1, n + 1) if degree[v] == 1)
        edges.append((leaf, vertex))
        degree[leaf] -= 1
        degree[vertex] -= 1
    last = [v for v in range(1, n + 1) if degree[v] == 1]
    edges.append((last[0], last[1]))
    return [(min(a, b), max(a, b)) for a, b in edges]


def make_topology(kind, n, coupling=1.0, seed=0):
    """Connected network of a named family with uniform coupling"""
    if kind not in TOPOLOGIES:
        raise DomainError(f"unknown topology {kind!r}; choose from {', '.join(TOPOLOGIES)}")
    minimum = 3 if kind == 'ring' else 2
    if n < minimum:
        raise DomainError(f"{kind} needs at least {minimum} vertices, got {n}")
    if not coupling > 0:
        raise DomainError(f"coupling must be positive, got {coupling}")

    if kind == 'chain':
        pairs = [(v, v + 1) for v in range(1, n)]
    elif kind == 'ring':
        pairs = [(v, v + 1) for v in range(1, n)] + [(1, n)]
    elif kind == 'star':
        pairs = [(1, v) for v in range(2, n + 1)]
    elif kind == 'complete':
        pairs = list(combinations(range(1, n + 1), 2))
    else:
        # Spanning tree first, then each remaining pair with probability 1/2
        rng = np.random.default_rng(seed)
        pairs = _random_tree(n, rng)
        tree = set(pairs)
        for pair in combinations(range(1, n + 1), 2):
            if pair not in tree and rng.random() < 0.5:
                pairs.append(pair)

    return QuditNetwork(n, tuple((i, j, float(coupling)) for i, j in pairs))


def randomize_couplings(net, rng, high=2.0):
    """Redraw every coupling uniformly from (0, high]"""
    couplings = high * (1.0 - rng.random(len(net.edges)))
    return net.with_couplings(couplings)
