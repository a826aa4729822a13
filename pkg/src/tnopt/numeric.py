"""Dense execution of contraction sequences on small random tensors.

Used to check that every ordering of a network produces the same tensor,
i.e. that the contraction-step semantics are those of index summation.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .network import TensorNetwork, _check, contract_step

MAX_ELEMENTS = 10**6


class AssignmentTooLarge(ValueError):
    pass


@dataclass
class DenseAssignment:
    """One dense tensor per vertex.

    ``labels[v]`` names the axes of ``tensors[v]``: ``("e", edge, end)``
    for an edge slot (``end`` is 0 for the ``u`` side, 1 for ``v``; a
    self-loop owns both) and ``("l", leg)`` for an open leg.
    """

    tensors: dict[int, np.ndarray]
    labels: dict[int, list[tuple]]


def _axes(net: TensorNetwork, vertex: int) -> list[tuple[tuple, int]]:
    axes = []
    for eid in sorted(net.edges):
        e = net.edges[eid]
        if e.u == vertex:
            axes.append((("e", eid, 0), e.chi))
        if e.v == vertex:
            axes.append((("e", eid, 1), e.chi))
    for lid in sorted(net.open_legs):
        g = net.open_legs[lid]
        if g.vertex == vertex:
            axes.append((("l", lid), g.chi))
    return axes


def random_assignment(net: TensorNetwork, seed=None) -> DenseAssignment:
    """I.i.d. uniform entries on [-1, 1] for every vertex tensor."""
    rng = np.random.default_rng(seed)
    tensors, labels = {}, {}
    for v in sorted(net.vertices):
        axes = _axes(net, v)
        shape = tuple(d for _, d in axes)
        if prod(shape) > MAX_ELEMENTS:
            raise AssignmentTooLarge(
                f"vertex {v} tensor would hold {prod(shape)} elements (limit {MAX_ELEMENTS})")
        tensors[v] = rng.uniform(-1.0, 1.0, size=shape)
        labels[v] = [lab for lab, _ in axes]
    return DenseAssignment(tensors, labels)


def execute(net: TensorNetwork, asg: DenseAssignment, seq) -> dict[int, np.ndarray]:
    """Contract ``asg`` along ``seq``.

    Returns one tensor per surviving vertex with axes ordered by open-leg
    id.  A connected network leaves a single entry.
    """
    _check(net, seq)
    tensors = dict(asg.tensors)
    labels = {v: list(ls) for v, ls in asg.labels.items()}
    for e in seq:
        edge = net.edges[e]
        a_lab, b_lab = ("e", e, 0), ("e", e, 1)
        if edge.is_loop:
            t, ls = tensors[edge.u], labels[edge.u]
            i, j = ls.index(a_lab), ls.index(b_lab)
            tensors[edge.u] = np.trace(t, axis1=i, axis2=j)
            labels[edge.u] = [x for x in ls if x not in (a_lab, b_lab)]
        else:
            tu, lu = tensors.pop(edge.u), labels.pop(edge.u)
            tv, lv = tensors.pop(edge.v), labels.pop(edge.v)
            i, j = lu.index(a_lab), lv.index(b_lab)
            if tu.shape[i] != tv.shape[j]:
                raise RuntimeError(f"axis mismatch contracting edge {e}")
            keep = min(edge.u, edge.v)
            tensors[keep] = np.tensordot(tu, tv, axes=([i], [j]))
            labels[keep] = [x for x in lu if x != a_lab] + [x for x in lv if x != b_lab]
        net, _ = contract_step(net, e)
    out = {}
    for v, t in tensors.items():
        ls = labels[v]
        order = sorted(range(len(ls)), key=lambda k: ls[k][1])
        out[v] = np.transpose(t, order) if order else t
    return out


def max_relative_deviation(a: dict[int, np.ndarray], b: dict[int, np.ndarray],
                           floor: float = 1e-12) -> float:
    """Max-norm difference relative to the max-norm of ``a``."""
    if a.keys() != b.keys():
        return float("inf")
    worst = 0.0
    for v in a:
        x, y = np.asarray(a[v]), np.asarray(b[v])
        if x.shape != y.shape:
            return float("inf")
        scale = max(float(np.max(np.abs(x), initial=0.0)), floor)
        worst = max(worst, float(np.max(np.abs(x - y), initial=0.0)) / scale)
    return worst
