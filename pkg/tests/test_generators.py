import json

import pytest

from tnopt.generators import (ErdosRenyiSpec, SquareSpec, erdos_renyi, load_network,
                              three_tensor_example, save_network, square_lattice)
from tnopt.network import NetworkError


@pytest.mark.parametrize("L", range(1, 13))
def test_square_counts(L):
    net = square_lattice(SquareSpec(L, 3))
    assert len(net.vertices) == L * L
    assert net.n_edges == 2 * L * (L - 1)
    assert not net.open_legs
    assert all(e.chi == 3 for e in net.edges.values())


def test_square_examples():
    assert square_lattice(SquareSpec(2, 2)).n_edges == 4
    big = square_lattice(SquareSpec(10, 2))
    assert (len(big.vertices), big.n_edges) == (100, 180)
    one = square_lattice(SquareSpec(1, 2))
    assert (len(one.vertices), one.n_edges) == (1, 0)


def test_square_nearest_neighbour_only():
    L = 5
    net = square_lattice(SquareSpec(L, 2))
    for e in net.edges.values():
        (r1, c1), (r2, c2) = divmod(e.u, L), divmod(e.v, L)
        assert abs(r1 - r2) + abs(c1 - c2) == 1
    # horizontal block comes first
    first_vertical = L * (L - 1)
    assert all(divmod(net.edges[i].u, L)[0] == divmod(net.edges[i].v, L)[0]
               for i in range(first_vertical))


def test_er_forced():
    assert erdos_renyi(ErdosRenyiSpec(16, 1.0)).n_edges == 120
    assert erdos_renyi(ErdosRenyiSpec(16, 0.0)).n_edges == 0
    assert len(erdos_renyi(ErdosRenyiSpec(16, 0.0)).vertices) == 16


def test_er_binomial_window():
    counts = [erdos_renyi(ErdosRenyiSpec(16, 0.8, 2, s)).n_edges for s in range(300)]
    inside = sum(80 <= c <= 112 for c in counts)
    assert inside >= 0.99 * len(counts)


def test_er_reproducible():
    spec = ErdosRenyiSpec(12, 0.5, 4, 11)
    assert erdos_renyi(spec) == erdos_renyi(spec)
    assert erdos_renyi(spec) != erdos_renyi(ErdosRenyiSpec(12, 0.5, 4, 12))


def test_round_trip(tmp_path):
    net = square_lattice(SquareSpec(3, 2))
    path = tmp_path / "net.json"
    save_network(net, path)
    assert load_network(path) == net


def test_bad_endpoint(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"vertices": [0, 1, 2, 3],
                                "edges": [{"id": 0, "u": 0, "v": 99, "chi": 2}],
                                "open_legs": []}))
    with pytest.raises(NetworkError, match="99"):
        load_network(path)


def test_unparseable(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(NetworkError):
        load_network(path)


def test_worked_example_by_hand(tmp_path):
    doc = {"vertices": [0, 1, 2],
           "edges": [{"id": 0, "u": 0, "v": 1, "chi": 2}, {"id": 1, "u": 0, "v": 2, "chi": 2}],
           "open_legs": [{"id": 0, "vertex": 0, "chi": 2}, {"id": 1, "vertex": 0, "chi": 2},
                         {"id": 2, "vertex": 2, "chi": 2}, {"id": 3, "vertex": 2, "chi": 2}]}
    path = tmp_path / "ex.json"
    path.write_text(json.dumps(doc))
    net = load_network(path)
    assert (len(net.vertices), net.n_edges, len(net.open_legs)) == (3, 2, 4)
    assert net == three_tensor_example(2)
