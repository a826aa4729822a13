"""Tensor-network multigraph, contraction steps and the sequence cost function.

A network is a multigraph whose vertices are tensors, whose internal edges are
contracted indices and whose open legs are uncontracted indices.  Contracting
an edge between two distinct vertices merges them; contracting a self-loop is
a partial trace.  The cost of one step is the product of the bond dimensions of
every distinct edge and open leg touching either endpoint, and the cost of a
sequence is the sum of its step costs.  Costs are Python ints, so they are
exact at any magnitude.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "Edge",
    "Leg",
    "TensorNetwork",
    "NetworkError",
    "InvalidSequence",
    "EvalBudget",
    "StepRecord",
    "step_cost",
    "contract_step",
    "evaluate_sequence",
    "validate_sequence",
    "decode_keys",
    "final_state",
    "Contractor",
]


class NetworkError(ValueError):
    """Raised when a network violates its structural invariants."""


class InvalidSequence(ValueError):
    """Raised when a contraction sequence is not a permutation of the edges."""


class Edge(NamedTuple):
    u: int
    v: int
    chi: int

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


class Leg(NamedTuple):
    vertex: int
    chi: int


@dataclass(frozen=True)
class TensorNetwork:
    """Multigraph of tensors with dimensioned edges and open legs.

    Instances are treated as immutable; every contraction returns a new
    network.  Parallel edges and self-loops are allowed.
    """

    vertices: frozenset[int]
    edges: dict[int, Edge] = field(default_factory=dict)
    open_legs: dict[int, Leg] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        edges = {int(k): Edge(*map(int, e)) for k, e in self.edges.items()}
        legs = {int(k): Leg(*map(int, g)) for k, g in self.open_legs.items()}
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "open_legs", legs)
        for eid, e in edges.items():
            for end in (e.u, e.v):
                if end not in self.vertices:
                    raise NetworkError(f"edge {eid} references unknown vertex {end}")
            if e.chi < 1:
                raise NetworkError(f"edge {eid} has bond dimension {e.chi} < 1")
        for lid, g in legs.items():
            if g.vertex not in self.vertices:
                raise NetworkError(f"open leg {lid} references unknown vertex {g.vertex}")
            if g.chi < 1:
                raise NetworkError(f"open leg {lid} has bond dimension {g.chi} < 1")

    @classmethod
    def from_edge_list(cls, n_vertices: int, edges: Iterable[tuple[int, int, int]],
                       open_legs: Iterable[tuple[int, int]] = ()) -> "TensorNetwork":
        """Build a network on vertices ``0..n-1`` with dense edge/leg ids."""
        return cls(
            vertices=frozenset(range(n_vertices)),
            edges={i: Edge(u, v, chi) for i, (u, v, chi) in enumerate(edges)},
            open_legs={i: Leg(v, chi) for i, (v, chi) in enumerate(open_legs)},
        )

    @property
    def edge_ids(self) -> list[int]:
        return sorted(self.edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def incident(self, vertex: int) -> tuple[set[int], set[int]]:
        """Ids of edges and open legs touching ``vertex``."""
        es = {i for i, e in self.edges.items() if vertex in (e.u, e.v)}
        ls = {i for i, g in self.open_legs.items() if g.vertex == vertex}
        return es, ls

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "vertices": sorted(self.vertices),
            "edges": [{"id": i, "u": e.u, "v": e.v, "chi": e.chi}
                      for i, e in sorted(self.edges.items())],
            "open_legs": [{"id": i, "vertex": g.vertex, "chi": g.chi}
                          for i, g in sorted(self.open_legs.items())],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TensorNetwork":
        try:
            vertices = [int(v) for v in data["vertices"]]
            edges = {}
            for item in data.get("edges", []):
                eid = int(item["id"])
                if eid in edges:
                    raise NetworkError(f"duplicate edge id {eid}")
                edges[eid] = Edge(int(item["u"]), int(item["v"]), int(item["chi"]))
            legs = {}
            for item in data.get("open_legs", []):
                lid = int(item["id"])
                if lid in legs:
                    raise NetworkError(f"duplicate open leg id {lid}")
                legs[lid] = Leg(int(item["vertex"]), int(item["chi"]))
        except (KeyError, TypeError) as exc:
            raise NetworkError(f"malformed network description: {exc!r}") from exc
        if len(set(vertices)) != len(vertices):
            raise NetworkError("duplicate vertex ids")
        return cls(frozenset(vertices), edges, legs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "TensorNetwork":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise NetworkError(f"cannot parse network JSON: {exc}") from exc
        return cls.from_dict(data)


# ---------------------------------------------------------------------------
# Budget accounting


@dataclass
class EvalBudget:
    """Counts incremental step-cost computations.

    ``edge_count`` incremental computations make up one full evaluation of
    the sequence cost function.
    """

    edge_count: int
    step_computations: int = 0

    def charge(self, n: int = 1) -> None:
        if n < 0:
            raise ValueError("budget charges must be non-negative")
        self.step_computations += n

    @property
    def full_evaluations(self) -> float:
        return self.step_computations / max(self.edge_count, 1)

    @property
    def full_evaluations_exact(self) -> Fraction:
        return Fraction(self.step_computations, max(self.edge_count, 1))

    def can_afford(self, max_full_evaluations: float, n_full: int = 1) -> bool:
        """Whether ``n_full`` more full evaluations stay within the limit."""
        step_limit = max_full_evaluations * max(self.edge_count, 1)
        return self.step_computations + n_full * max(self.edge_count, 1) <= step_limit + 1e-9

    def report(self) -> dict:
        return {"step_computations": self.step_computations,
                "edge_count": self.edge_count,
                "full_evaluations": self.full_evaluations}


@dataclass
class StepRecord:
    edge: int
    step_cost: int
    accumulated_cost: int
    snapshot: TensorNetwork | None = None


# ---------------------------------------------------------------------------
# Reference (dictionary based) contraction semantics


def _endpoints(net: TensorNetwork, e: int) -> Edge:
    try:
        return net.edges[e]
    except KeyError:
        raise KeyError(f"no such edge: {e}") from None


def step_cost(net: TensorNetwork, e: int) -> int:
    """Multiplication count of contracting edge ``e`` in its current state."""
    edge = _endpoints(net, e)
    ends = {edge.u, edge.v}
    cost = 1
    for other in net.edges.values():
        if other.u in ends or other.v in ends:
            cost *= other.chi
    for leg in net.open_legs.values():
        if leg.vertex in ends:
            cost *= leg.chi
    return cost


def contract_step(net: TensorNetwork, e: int) -> tuple[TensorNetwork, int]:
    """Contract edge ``e``; returns the new network and the step cost.

    Merging keeps the smaller vertex id, so the surviving vertex ids of a
    fully contracted network do not depend on the order.
    """
    cost = step_cost(net, e)
    edge = net.edges[e]
    edges = {i: x for i, x in net.edges.items() if i != e}
    if edge.is_loop:
        return TensorNetwork(net.vertices, edges, dict(net.open_legs)), cost
    keep, gone = min(edge.u, edge.v), max(edge.u, edge.v)

    def relabel(w):
        return keep if w == gone else w

    edges = {i: Edge(relabel(x.u), relabel(x.v), x.chi) for i, x in edges.items()}
    legs = {i: Leg(relabel(g.vertex), g.chi) for i, g in net.open_legs.items()}
    return TensorNetwork(net.vertices - {gone}, edges, legs), cost


def validate_sequence(net: TensorNetwork, seq: Sequence[int]) -> str | None:
    """Return ``None`` if ``seq`` is a permutation of the edges, else a message."""
    seen = set()
    for e in seq:
        if e not in net.edges:
            return f"unknown edge {e}"
        if e in seen:
            return f"duplicate edge {e}"
        seen.add(e)
    missing = sorted(set(net.edges) - seen)
    if missing:
        return f"missing edge {missing[0]}"
    return None


def _check(net: TensorNetwork, seq: Sequence[int]) -> None:
    problem = validate_sequence(net, seq)
    if problem is not None:
        raise InvalidSequence(f"invalid sequence: {problem}")


def evaluate_sequence(net: TensorNetwork, seq: Sequence[int],
                      budget: EvalBudget | None = None,
                      snapshots: bool = False) -> tuple[int, list[StepRecord]]:
    """Total cost of ``seq`` together with one record per step."""
    _check(net, seq)
    records = []
    total = 0
    for e in seq:
        net, cost = contract_step(net, e)
        total += cost
        records.append(StepRecord(e, cost, total, net if snapshots else None))
    if budget is not None:
        budget.charge(len(seq))
    return total, records


def final_state(net: TensorNetwork, seq: Sequence[int]) -> TensorNetwork:
    _check(net, seq)
    for e in seq:
        net, _ = contract_step(net, e)
    return net


def decode_keys(keys, edge_ids: Sequence[int]) -> list[int]:
    """Edges ordered by ascending key, ties by position in ``edge_ids``."""
    keys = np.asarray(keys, dtype=float)
    if keys.shape != (len(edge_ids),):
        raise ValueError(f"expected {len(edge_ids)} keys, got shape {keys.shape}")
    if np.any(keys < 0.0) or np.any(keys > 1.0) or np.any(np.isnan(keys)):
        raise ValueError("random keys must lie in [0, 1]")
    order = np.argsort(keys, kind="stable")
    return [edge_ids[i] for i in order]


# ---------------------------------------------------------------------------
# Fast engine used by the optimizers


class Contractor:
    """Bitmask contraction engine for one network.

    Each current vertex carries the bitmask of alive edges touching it, so a
    step cost is a popcount-weighted product.  Vertex merges are tracked with
    a union-find array.  The engine is stateless; search states are plain
    tuples created by :meth:`initial_state` and copied with :meth:`copy`.
    """

    def __init__(self, net: TensorNetwork):
        self.net = net
        self.edge_ids = net.edge_ids
        self.n_edges = len(self.edge_ids)
        self.bit_of = {e: i for i, e in enumerate(self.edge_ids)}
        vindex = {v: i for i, v in enumerate(sorted(net.vertices))}
        self.n_vertices = len(vindex)
        self.ends = [(vindex[net.edges[e].u], vindex[net.edges[e].v]) for e in self.edge_ids]
        chis = [net.edges[e].chi for e in self.edge_ids]
        self.uniform_chi = chis[0] if chis and all(c == chis[0] for c in chis) else None
        classes: dict[int, int] = {}
        for i, c in enumerate(chis):
            if c > 1:
                classes[c] = classes.get(c, 0) | (1 << i)
        self.chi_classes = sorted(classes.items())
        inc = [0] * self.n_vertices
        for i, (a, b) in enumerate(self.ends):
            inc[a] |= 1 << i
            inc[b] |= 1 << i
        legprod = [1] * self.n_vertices
        for g in net.open_legs.values():
            legprod[vindex[g.vertex]] *= g.chi
        self._inc0 = inc
        self._leg0 = legprod

    def initial_state(self):
        return (list(range(self.n_vertices)), list(self._inc0), list(self._leg0))

    @staticmethod
    def copy(state):
        parent, inc, leg = state
        return (parent[:], inc[:], leg[:])

    @staticmethod
    def _find(parent, x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def _mask_product(self, mask: int) -> int:
        if self.uniform_chi is not None:
            return self.uniform_chi ** mask.bit_count()
        out = 1
        for chi, cls in self.chi_classes:
            k = (mask & cls).bit_count()
            if k:
                out *= chi ** k
        return out

    def step_cost(self, state, bit: int) -> int:
        parent, inc, leg = state
        u, v = self.ends[bit]
        a = self._find(parent, u)
        b = self._find(parent, v)
        if a == b:
            return leg[a] * self._mask_product(inc[a])
        return leg[a] * leg[b] * self._mask_product(inc[a] | inc[b])

    def contract(self, state, bit: int) -> int:
        """Apply one step in place and return its cost."""
        parent, inc, leg = state
        u, v = self.ends[bit]
        a = self._find(parent, u)
        b = self._find(parent, v)
        if a == b:
            cost = leg[a] * self._mask_product(inc[a])
            inc[a] &= ~(1 << bit)
            return cost
        mask = inc[a] | inc[b]
        cost = leg[a] * leg[b] * self._mask_product(mask)
        parent[b] = a
        inc[a] = mask & ~(1 << bit)
        leg[a] *= leg[b]
        return cost

    def bits_cost(self, bits: Sequence[int]) -> int:
        state = self.initial_state()
        total = 0
        for bit in bits:
            total += self.contract(state, bit)
        return total

    def sequence_cost(self, seq: Sequence[int], budget: EvalBudget | None = None) -> int:
        """Total cost of a sequence of edge ids (no validation)."""
        bit_of = self.bit_of
        total = self.bits_cost([bit_of[e] for e in seq])
        if budget is not None:
            budget.charge(len(seq))
        return total
