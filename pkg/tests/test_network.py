import json
from math import comb

import numpy as np
import pytest

from core.errors import DomainError, ValidationError
from core.network import (QuditNetwork, is_connected, load_network, make_topology, parse_network,
                          randomize_couplings, serialize_network, shortest_path)


def test_parse_normalizes_edges():
    net = parse_network('{"num_qudits": 3, "edges": [[3, 2, 0.5], [1, 2, 1.0]]}')
    assert net.edges == ((1, 2, 1.0), (2, 3, 0.5))
    assert net.total_coupling == pytest.approx(1.5)


def test_non_positive_coupling_rejected():
    with pytest.raises(ValidationError, match="antiferromagnetic"):
        parse_network('{"num_qudits": 2, "edges": [[1, 2, -1.0]]}')
    with pytest.raises(ValidationError):
        parse_network('{"num_qudits": 2, "edges": [[1, 2, 0]]}')


@pytest.mark.parametrize("text", [
    'not json',
    '[1, 2]',
    '{"edges": []}',
    '{"num_qudits": 2, "edges": [[1, 2, 1.0]], "extra": 1}',
    '{"num_qudits": 2, "edges": [[1, 3, 1.0]]}',
    '{"num_qudits": 2, "edges": [[1, 2, 1.0], [2, 1, 2.0]]}',
    '{"num_qudits": 2, "edges": [[1, 1, 1.0]]}',
])
def test_invalid_networks(text):
    with pytest.raises(ValidationError):
        parse_network(text)


def test_serialize_round_trip():
    net = make_topology('star', 5, coupling=0.25)
    assert parse_network(serialize_network(net)) == net


def test_load_network(tmp_path):
    path = tmp_path / 'net.json'
    path.write_text(json.dumps({'num_qudits': 3, 'edges': [[1, 2, 1], [2, 3, 2]]}))
    assert load_network(path).num_vertices == 3


@pytest.mark.parametrize("kind, n, edges", [
    ('chain', 5, 4),
    ('ring', 5, 5),
    ('star', 5, 4),
    ('complete', 5, comb(5, 2)),
])
def test_topology_edge_counts(kind, n, edges):
    net = make_topology(kind, n)
    assert len(net.edges) == edges
    assert is_connected(net)


def test_random_connected_is_seeded_and_connected():
    for seed in range(10):
        net = make_topology('random_connected', 6, seed=seed)
        assert is_connected(net)
        assert net == make_topology('random_connected', 6, seed=seed)


def test_topology_errors():
    with pytest.raises(DomainError):
        make_topology('ring', 2)
    with pytest.raises(DomainError):
        make_topology('ladder', 4)


def test_disconnected_network():
    net = QuditNetwork(4, ((1, 2, 1.0), (3, 4, 1.0)))
    assert not is_connected(net)
    assert shortest_path(net, 1, 4) is None


def test_shortest_path_on_ring():
    assert shortest_path(make_topology('ring', 6), 1, 5) == [1, 6, 5]


def test_randomized_couplings_stay_in_range():
    net = randomize_couplings(make_topology('complete', 5), np.random.default_rng(3))
    couplings = [j for _, _, j in net.edges]
    assert all(0 < j <= 2.0 for j in couplings)
    assert len(set(couplings)) == len(couplings)
