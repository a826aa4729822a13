import itertools
import random

import pytest

from tnopt.network import TensorNetwork


def oracle_cost(net: TensorNetwork, order) -> int:
    """Cost of ``order`` recomputed from scratch on the original edge list.

    Vertices are tracked as groups of original vertices; a step costs the
    product of chi over every uncontracted edge and leg touching its group.
    """
    group = {v: frozenset([v]) for v in net.vertices}
    alive = set(net.edges)
    total = 0
    for e in order:
        edge = net.edges[e]
        gs = group[edge.u] | group[edge.v]
        c = 1
        for f in alive:
            x = net.edges[f]
            if x.u in gs or x.v in gs:
                c *= x.chi
        for g in net.open_legs.values():
            if g.vertex in gs:
                c *= g.chi
        total += c
        alive.discard(e)
        for w in gs:
            group[w] = gs
    return total


def brute_force(net: TensorNetwork):
    best = None
    for perm in itertools.permutations(net.edge_ids):
        c = oracle_cost(net, perm)
        if best is None or c < best[0]:
            best = (c, list(perm))
    return best


def random_network(rng: random.Random, max_vertices=5, max_edges=7, max_chi=4,
                   max_legs=3, loops=True) -> TensorNetwork:
    n = rng.randint(1, max_vertices)
    n_edges = rng.randint(1, max_edges)
    edges = []
    for _ in range(n_edges):
        u = rng.randrange(n)
        v = rng.randrange(n) if loops else rng.choice([w for w in range(n) if w != u] or [u])
        edges.append((u, v, rng.randint(1, max_chi)))
    legs = [(rng.randrange(n), rng.randint(1, max_chi)) for _ in range(rng.randint(0, max_legs))]
    return TensorNetwork.from_edge_list(n, edges, legs)


@pytest.fixture
def four_cycle():
    from tnopt.generators import SquareSpec, square_lattice
    return square_lattice(SquareSpec(2, 2))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
