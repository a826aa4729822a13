"""Benchmark network families and network file I/O."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .network import Edge, NetworkError, TensorNetwork


@dataclass(frozen=True)
class SquareSpec:
    L: int
    chi: int = 2


@dataclass(frozen=True)
class ErdosRenyiSpec:
    n: int
    p: float = 0.8
    chi: int = 2
    seed: int | None = 0


def square_lattice(spec: SquareSpec) -> TensorNetwork:
    """Closed ``L x L`` grid with nearest-neighbour bonds.

    Vertex ``(r, c)`` has id ``r * L + c``.  Horizontal edges come first
    (row-major), then vertical edges (row-major by upper endpoint).
    """
    L, chi = spec.L, spec.chi
    if L < 1:
        raise ValueError("lattice size must be >= 1")
    edges = []
    for r in range(L):
        for c in range(L - 1):
            edges.append((r * L + c, r * L + c + 1, chi))
    for r in range(L - 1):
        for c in range(L):
            edges.append((r * L + c, (r + 1) * L + c, chi))
    return TensorNetwork.from_edge_list(L * L, edges)


def horizontal_edge(L: int, r: int, c: int) -> int:
    """Id of the bond between ``(r, c)`` and ``(r, c+1)``."""
    return r * (L - 1) + c


def vertical_edge(L: int, r: int, c: int) -> int:
    """Id of the bond between ``(r, c)`` and ``(r+1, c)``."""
    return L * (L - 1) + r * L + c


def erdos_renyi(spec: ErdosRenyiSpec, rng: np.random.Generator | None = None) -> TensorNetwork:
    """Random graph where each vertex pair is bonded with probability ``p``.

    Pairs ``(i, j), i < j`` are visited in lexicographic order and each
    consumes exactly one uniform variate.  An explicit ``rng`` overrides
    ``spec.seed``.  Isolated vertices are kept.
    """
    if spec.n < 1:
        raise ValueError("need at least one vertex")
    if not 0.0 <= spec.p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    n = spec.n
    draws = rng.random(n * (n - 1) // 2)
    edges = []
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if draws[k] < spec.p:
                edges.append((i, j, spec.chi))
            k += 1
    return TensorNetwork.from_edge_list(n, edges)


def three_tensor_example(chi=2) -> TensorNetwork:
    """``N_klmn = sum_ij T_ijkl X_i Y_jmn``.

    Vertices: T=0, X=1, Y=2.  Edges: i=0 (T-X), j=1 (T-Y).  Open legs
    k=0, l=1 on T and m=2, n=3 on Y.  ``chi`` is either one int or a
    mapping from the index letters to bond dimensions.
    """
    if isinstance(chi, int):
        chi = dict.fromkeys("ijklmn", chi)
    return TensorNetwork(
        vertices=frozenset({0, 1, 2}),
        edges={0: Edge(0, 1, chi["i"]), 1: Edge(0, 2, chi["j"])},
        open_legs={0: (0, chi["k"]), 1: (0, chi["l"]), 2: (2, chi["m"]), 3: (2, chi["n"])},
    )


def load_network(path) -> TensorNetwork:
    text = Path(path).read_text()
    return TensorNetwork.from_json(text)


def save_network(net: TensorNetwork, path) -> None:
    Path(path).write_text(net.to_json() + "\n")


def load_sequence(path) -> list[int]:
    import json

    try:
        data = json.loads(Path(path).read_text())
        return [int(e) for e in data["order"]]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise NetworkError(f"malformed sequence file {path}: {exc!r}") from exc


def save_sequence(order, path) -> None:
    import json

    Path(path).write_text(json.dumps({"order": [int(e) for e in order]}) + "\n")
