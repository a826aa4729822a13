import random

import pytest

from tnopt.deterministic import (GreedyConfig, SearchTooLarge, exhaustive_search,
                                 greedy_search)
from tnopt.generators import SquareSpec, three_tensor_example, square_lattice
from tnopt.network import EvalBudget, TensorNetwork, evaluate_sequence, validate_sequence

from conftest import brute_force, oracle_cost, random_network


def test_exhaustive_examples(four_cycle):
    res = exhaustive_search(three_tensor_example(2))
    assert res.best_sequence == [0, 1]
    assert res.best_cost == 48
    assert exhaustive_search(four_cycle).best_cost == 22
    assert exhaustive_search(TensorNetwork.from_edge_list(2, [(0, 1, 3)])).best_cost == 3


def test_exhaustive_guard():
    net = square_lattice(SquareSpec(4, 2))
    with pytest.raises(SearchTooLarge):
        exhaustive_search(net)
    with pytest.raises(ValueError):
        exhaustive_search(TensorNetwork.from_edge_list(2, []))


def test_exhaustive_matches_brute_force():
    rng = random.Random(3)
    for _ in range(25):
        net = random_network(rng, max_vertices=5, max_edges=6)
        cost, _ = brute_force(net)
        res = exhaustive_search(net)
        assert res.best_cost == cost
        assert oracle_cost(net, res.best_sequence) == cost


def test_exhaustive_fuzz():
    rng = random.Random(5)
    for _ in range(10):
        net = random_network(rng, max_vertices=6, max_edges=8)
        best = exhaustive_search(net).best_cost
        for _ in range(100):
            seq = net.edge_ids
            rng.shuffle(seq)
            assert best <= evaluate_sequence(net, seq)[0]


def test_exhaustive_trace_non_increasing():
    net = TensorNetwork.from_edge_list(
        5, [(0, 1, 3), (1, 2, 2), (2, 3, 4), (3, 4, 2), (4, 0, 3), (0, 2, 2), (1, 3, 5)])
    res = exhaustive_search(net)
    costs = [c for _, c in res.trace]
    assert costs == sorted(costs, reverse=True)
    assert costs[-1] == res.best_cost


def test_greedy_k1_worked_example():
    res = greedy_search(three_tensor_example(2), GreedyConfig(k=1))
    assert res.best_sequence == [0, 1]
    assert res.best_cost == 48


@pytest.mark.parametrize("L", [2, 3, 4])
def test_greedy_k1_budget(L):
    net = square_lattice(SquareSpec(L, 2))
    budget = EvalBudget(net.n_edges)
    greedy_search(net, GreedyConfig(k=1, seed=1), budget)
    E = net.n_edges
    assert budget.step_computations == E * (E + 1) // 2


def test_greedy_full_lookahead_is_exact():
    rng = random.Random(9)
    for _ in range(10):
        net = random_network(rng, max_vertices=4, max_edges=5)
        res = greedy_search(net, GreedyConfig(k=net.n_edges, seed=0))
        assert res.best_cost == exhaustive_search(net).best_cost


def test_greedy_outputs_valid_sequences():
    rng = random.Random(11)
    for k in (1, 2, 3):
        for _ in range(10):
            net = random_network(rng, max_vertices=6, max_edges=8)
            res = greedy_search(net, GreedyConfig(k=k, seed=rng.randrange(100)))
            assert validate_sequence(net, res.best_sequence) is None
            assert evaluate_sequence(net, res.best_sequence)[0] == res.best_cost


def test_greedy_config_validation():
    with pytest.raises(ValueError):
        GreedyConfig(k=0)


def test_greedy_degeneracy_6x6():
    net = square_lattice(SquareSpec(6, 10))
    costs = {greedy_search(net, GreedyConfig(k=2, seed=s)).best_cost for s in range(40)}
    assert len(costs) > 1


def test_greedy_seed_reproducible():
    net = square_lattice(SquareSpec(4, 10))
    a = greedy_search(net, GreedyConfig(k=2, seed=3))
    b = greedy_search(net, GreedyConfig(k=2, seed=3))
    assert a.best_sequence == b.best_sequence
    assert a.evaluations_used == b.evaluations_used
