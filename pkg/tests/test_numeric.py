import itertools
import random

import numpy as np
import pytest

from tnopt.generators import three_tensor_example
from tnopt.network import TensorNetwork
from tnopt.numeric import (AssignmentTooLarge, DenseAssignment, execute,
                           max_relative_deviation, random_assignment)

from conftest import random_network


def test_worked_example_shapes_and_orders():
    net = three_tensor_example(2)
    asg = random_assignment(net, 0)
    assert [asg.tensors[v].shape for v in (0, 1, 2)] == [(2, 2, 2, 2), (2,), (2, 2, 2)]
    a = execute(net, asg, [0, 1])
    b = execute(net, asg, [1, 0])
    assert list(a) == [0] and a[0].shape == (2, 2, 2, 2)
    assert max_relative_deviation(a, b) <= 1e-12
    # direct einsum over the index structure N_klmn = sum_ij T_ijkl X_i Y_jmn
    T, X, Y = asg.tensors[0], asg.tensors[1], asg.tensors[2]
    direct = np.einsum("ijkl,i,jmn->klmn", T, X, Y)
    np.testing.assert_allclose(a[0], direct, rtol=1e-12, atol=1e-14)


def test_assignment_deterministic():
    net = three_tensor_example(3)
    a, b = random_assignment(net, 5), random_assignment(net, 5)
    for v in a.tensors:
        assert np.array_equal(a.tensors[v], b.tensors[v])
        assert np.all(np.abs(a.tensors[v]) <= 1.0)


def test_self_loop_shape():
    net = TensorNetwork.from_edge_list(1, [(0, 0, 3)])
    assert random_assignment(net, 0).tensors[0].shape == (3, 3)


def test_element_guard():
    net = TensorNetwork.from_edge_list(1, [], [(0, 10)] * 8)
    with pytest.raises(AssignmentTooLarge):
        random_assignment(net, 0)


def test_four_cycle_all_orders(four_cycle):
    asg = random_assignment(four_cycle, 1)
    ref = execute(four_cycle, asg, [0, 1, 2, 3])
    assert ref[0].shape == ()
    for perm in itertools.permutations(range(4)):
        assert max_relative_deviation(ref, execute(four_cycle, asg, perm)) <= 1e-12


def test_parallel_pair_direct_sum():
    net = TensorNetwork.from_edge_list(2, [(0, 1, 2), (0, 1, 2)])
    asg = random_assignment(net, 3)
    T, S = asg.tensors[0], asg.tensors[1]
    expected = sum(T[a, b] * S[a, b] for a in range(2) for b in range(2))
    for order in ([0, 1], [1, 0]):
        got = execute(net, asg, order)[0]
        assert float(got) == pytest.approx(expected, rel=1e-12)


def test_identity_trace_multiplies_by_chi():
    chi = 4
    net = TensorNetwork.from_edge_list(1, [(0, 0, chi)], [(0, 3)])
    x = np.array([0.5, -1.0, 2.0])
    t = np.einsum("ab,k->abk", np.eye(chi), x)
    asg = DenseAssignment({0: t}, {0: [("e", 0, 0), ("e", 0, 1), ("l", 0)]})
    np.testing.assert_allclose(execute(net, asg, [0])[0], chi * x)


def test_disconnected_gives_one_tensor_per_component():
    net = TensorNetwork.from_edge_list(4, [(0, 1, 2), (2, 3, 2)], [(0, 2), (3, 2)])
    out = execute(net, random_assignment(net, 0), [1, 0])
    assert sorted(out) == [0, 2]


def test_random_networks_agree():
    rng = random.Random(17)
    trial = 0
    while trial < 50:
        net = random_network(rng, max_vertices=6, max_edges=7, max_chi=3, max_legs=3)
        try:
            asg = random_assignment(net, trial)
        except AssignmentTooLarge:
            continue
        trial += 1
        a, b = net.edge_ids, net.edge_ids
        rng.shuffle(a)
        rng.shuffle(b)
        assert max_relative_deviation(execute(net, asg, a), execute(net, asg, b)) <= 1e-9


def test_deviation_helper():
    a = {0: np.array([1.0, 2.0])}
    assert max_relative_deviation(a, {0: np.array([1.0, 2.0])}) == 0.0
    assert max_relative_deviation(a, {1: np.array([1.0, 2.0])}) == float("inf")
    assert max_relative_deviation({0: np.zeros(2)}, {0: np.zeros(2)}) == 0.0
