"""Exhaustive branch-and-bound and k-step greedy search."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .network import Contractor, EvalBudget, TensorNetwork

ENUMERATION_GUARD = 16


class SearchTooLarge(ValueError):
    pass


@dataclass
class OptimizerResult:
    best_sequence: list[int]
    best_cost: int
    trace: list[tuple[float, int]] = field(default_factory=list)
    evaluations_used: dict = field(default_factory=dict)
    algorithm: str = ""

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "best_sequence": list(self.best_sequence),
            "best_cost": self.best_cost,
            "log10_best_cost": math.log10(self.best_cost) if self.best_cost else None,
            "trace": [{"full_evaluations": f, "best_cost": c} for f, c in self.trace],
            "evaluations_used": self.evaluations_used,
        }


@dataclass
class GreedyConfig:
    k: int = 2
    seed: int | None = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("greedy lookahead depth must be >= 1")


def exhaustive_search(net: TensorNetwork, budget: EvalBudget | None = None,
                      force: bool = False) -> OptimizerResult:
    """Global optimum by depth-first branch and bound.

    Edges are tried in ascending id order at every depth.  A prefix is
    dropped as soon as its accumulated cost, plus the chi of every edge still
    to be contracted, reaches the best complete cost.  That bound is sound
    because a step always costs at least the chi of its own edge.

    The contracted state depends only on which edges have been contracted,
    so a prefix is also dropped when an earlier prefix reached the same edge
    set at no greater cost.  Neither rule can discard the first optimal
    sequence in id order, so the result matches plain enumeration.
    """
    if net.n_edges == 0:
        raise ValueError("network has no edges")
    if net.n_edges > ENUMERATION_GUARD and not force:
        raise SearchTooLarge(
            f"{net.n_edges} edges exceeds the enumeration guard of {ENUMERATION_GUARD}; pass force=True")
    if budget is None:
        budget = EvalBudget(net.n_edges)
    eng = Contractor(net)
    n = eng.n_edges
    best_cost = None
    best_bits: list[int] = []
    trace = []
    prefix: list[int] = []
    used = [False] * n
    chi = [net.edges[e].chi for e in eng.edge_ids]
    seen: dict[int, int] = {}

    def dfs(state, acc, rest, done):
        nonlocal best_cost, best_bits
        if len(prefix) == n:
            best_cost = acc
            best_bits = prefix[:]
            trace.append((budget.full_evaluations, acc))
            return
        for bit in range(n):
            if used[bit]:
                continue
            cost = eng.step_cost(state, bit)
            budget.charge()
            if best_cost is not None and acc + cost + rest - chi[bit] >= best_cost:
                continue
            key = done | (1 << bit)
            if seen.get(key, acc + cost + 1) <= acc + cost:
                continue
            seen[key] = acc + cost
            child = eng.copy(state)
            eng.contract(child, bit)
            used[bit] = True
            prefix.append(bit)
            dfs(child, acc + cost, rest - chi[bit], key)
            prefix.pop()
            used[bit] = False

    dfs(eng.initial_state(), 0, sum(chi), 0)
    return OptimizerResult(
        best_sequence=[eng.edge_ids[b] for b in best_bits],
        best_cost=best_cost,
        trace=trace,
        evaluations_used=budget.report(),
        algorithm="exhaustive",
    )


def _lookahead(eng: Contractor, state, remaining: list[int], depth: int, budget: EvalBudget):
    """Minimum summed cost over all orderings of ``depth`` next steps.

    Returns ``(score, candidates)`` where candidates lists every minimising
    tuple of bits.
    """
    best = None
    cands: list[tuple[int, ...]] = []
    for idx, bit in enumerate(remaining):
        cost = eng.step_cost(state, bit)
        budget.charge()
        if depth == 1 or len(remaining) == 1:
            score, tails = cost, [()]
        else:
            child = eng.copy(state)
            eng.contract(child, bit)
            rest = remaining[:idx] + remaining[idx + 1:]
            sub, tails = _lookahead(eng, child, rest, depth - 1, budget)
            score = cost + sub
        if best is None or score < best:
            best = score
            cands = [(bit,) + t for t in tails]
        elif score == best:
            cands.extend((bit,) + t for t in tails)
    return best, cands


def greedy_search(net: TensorNetwork, cfg: GreedyConfig | None = None,
                  budget: EvalBudget | None = None) -> OptimizerResult:
    """Receding-horizon greedy search with ``cfg.k`` steps of lookahead.

    Each round scores every ordering of the next ``min(k, remaining)``
    contractions by their summed cost, picks a minimiser uniformly at random
    and commits only its first edge.  Nothing is cached between rounds.
    """
    cfg = cfg or GreedyConfig()
    if budget is None:
        budget = EvalBudget(net.n_edges)
    rng = np.random.default_rng(cfg.seed)
    eng = Contractor(net)
    state = eng.initial_state()
    remaining = list(range(eng.n_edges))
    chosen = []
    total = 0
    while remaining:
        _, cands = _lookahead(eng, state, remaining, cfg.k, budget)
        pick = cands[int(rng.integers(len(cands)))] if len(cands) > 1 else cands[0]
        bit = pick[0]
        total += eng.contract(state, bit)
        remaining.remove(bit)
        chosen.append(bit)
    seq = [eng.edge_ids[b] for b in chosen]
    return OptimizerResult(
        best_sequence=seq,
        best_cost=total,
        trace=[(budget.full_evaluations, total)],
        evaluations_used=budget.report(),
        algorithm=f"greedy-k{cfg.k}",
    )
