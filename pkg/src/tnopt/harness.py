"""Experiment harness: budget sweeps, statistics and sequence traces."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .deterministic import (ENUMERATION_GUARD, GreedyConfig, OptimizerResult,
                            exhaustive_search, greedy_search)
from .generators import (ErdosRenyiSpec, SquareSpec, erdos_renyi, horizontal_edge,
                         load_network, square_lattice, vertical_edge)
from .network import Contractor, TensorNetwork, _check, contract_step
from .stochastic import DualAnnealingSearch, GAConfig, GeneticSearch, SAConfig

DESKTOP_LIMIT = 10**16
STOCHASTIC = ("ga", "sa")


def log10_int(x: int) -> float:
    return math.log10(x) if x > 0 else float("-inf")


def compute_stats(costs) -> tuple[int, float]:
    """Lower median and sample standard deviation of ``log10(cost)``."""
    costs = list(costs)
    if not costs:
        raise ValueError("no costs to summarise")
    median = sorted(costs)[(len(costs) - 1) // 2]
    if len(costs) == 1:
        return median, 0.0
    return median, statistics.stdev(log10_int(c) for c in costs)


def handcrafted_row_sequence(spec: SquareSpec) -> list[int]:
    """Row-by-row baseline for the square lattice.

    Row ``r`` is absorbed into row ``r+1`` by contracting the vertical bonds
    between them left to right; the horizontal bonds of absorbed rows pile
    up as parallel bundles.  The last row is then contracted to a point one
    column gap at a time: the bottom-row bond merges the columns, turning the
    rest of its bundle into self-loops that are traced top to bottom.
    """
    L = spec.L
    if L < 2:
        raise ValueError("row sequence needs L >= 2")
    seq = [vertical_edge(L, r, c) for r in range(L - 1) for c in range(L)]
    for c in range(L - 1):
        seq.append(horizontal_edge(L, L - 1, c))
        seq.extend(horizontal_edge(L, r, c) for r in range(L - 1))
    return seq


# ---------------------------------------------------------------------------
# Running single algorithms


def make_search(alg: str, net: TensorNetwork, seed, **opts):
    if alg == "ga":
        cfg = GAConfig(seed=seed, **{k: v for k, v in opts.items()
                                     if k in ("population_size", "mutation_rate")})
        return GeneticSearch(net, cfg)
    if alg == "sa":
        keys = ("initial_temp", "restart_temp_ratio", "visit", "accept", "local_search",
                "energy", "chain_length", "moves")
        cfg = SAConfig(seed=seed, **{k: v for k, v in opts.items() if k in keys})
        return DualAnnealingSearch(net, cfg)
    raise ValueError(f"not a budgeted algorithm: {alg}")


def run_algorithm(alg: str, net: TensorNetwork, seed=0, budget: float | None = None,
                  k: int = 2, force: bool = False, **opts) -> OptimizerResult:
    """Single optimizer run; ``budget`` is in full evaluations (GA/SA only)."""
    if alg == "exhaustive":
        return exhaustive_search(net, force=force)
    if alg.startswith("greedy"):
        if alg != "greedy":
            k = int(alg.split("-k")[1])
        return greedy_search(net, GreedyConfig(k=k, seed=seed))
    if budget is None:
        raise ValueError(f"{alg} needs a budget")
    return make_search(alg, net, seed, **opts).advance(budget).result()


def run_variable_budget(net: TensorNetwork, algorithms, budgets, seed=0, k=2) -> list[dict]:
    """Best cost against budget; one growing run per stochastic algorithm."""
    budgets = list(budgets)
    if budgets != sorted(budgets):
        raise ValueError("budgets must be ascending")
    rows = []
    for alg in algorithms:
        if alg in STOCHASTIC:
            search = make_search(alg, net, seed)
            for b in budgets:
                search.advance(b)
                rows.append({"algorithm": alg,
                             "full_evaluations": search.budget.full_evaluations,
                             "best_cost": search.best_cost})
        else:
            res = run_algorithm(alg, net, seed=seed, k=k)
            rows.append({"algorithm": res.algorithm,
                         "full_evaluations": res.evaluations_used["full_evaluations"],
                         "best_cost": res.best_cost})
    return rows


def variable_budget_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "full_evaluations", "best_cost", "log10_best_cost"])
    for r in rows:
        w.writerow([r["algorithm"], f"{r['full_evaluations']:.6f}", r["best_cost"],
                    f"{log10_int(r['best_cost']):.6f}"])
    return buf.getvalue()


def time_remaining_run(net: TensorNetwork, alg: str, flops_per_eval: float | None = None,
                       seed=0, granule: float = 10.0,
                       max_full_evaluations: float | None = None, **opts) -> OptimizerResult:
    """Search until the search work matches the best sequence's own cost.

    Work is counted as ``full_evaluations * flops_per_eval`` multiplications;
    ``flops_per_eval`` defaults to ``10 * E``.  The budget grows by
    ``granule`` full evaluations per checkpoint.  ``max_full_evaluations``
    optionally caps the search.
    """
    if flops_per_eval is None:
        flops_per_eval = 10.0 * net.n_edges
    if flops_per_eval <= 0:
        raise ValueError("flops_per_eval must be positive")
    if alg not in STOCHASTIC:
        return run_algorithm(alg, net, seed=seed)
    search = make_search(alg, net, seed, **opts)
    limit = 0.0
    while True:
        limit += granule
        if max_full_evaluations is not None:
            limit = min(limit, max_full_evaluations)
        search.advance(limit)
        done = search.budget.full_evaluations * flops_per_eval >= search.best_cost
        if done or (max_full_evaluations is not None and limit >= max_full_evaluations):
            return search.result()


# ---------------------------------------------------------------------------
# Equal-budget sweeps


@dataclass
class ExperimentSpec:
    family: str = "square"
    sizes: tuple = (2, 3, 4)
    chi: int = 2
    algorithms: tuple = ("greedy", "ga", "sa")
    runs: int = 20
    base_seed: int = 0
    p: float = 0.8
    k: int = 2
    fixed_instance: bool = False
    network_file: str | None = None
    exhaustive_max_edges: int = ENUMERATION_GUARD

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        if self.family not in ("square", "er", "file"):
            raise ValueError(f"unknown family {self.family!r}")

    def network(self, size, run) -> TensorNetwork:
        if self.family == "square":
            return square_lattice(SquareSpec(size, self.chi))
        if self.family == "er":
            seed = self.base_seed if self.fixed_instance else self.base_seed + run
            return erdos_renyi(ErdosRenyiSpec(size, self.p, self.chi, seed))
        return load_network(self.network_file)


@dataclass
class RunSummary:
    runs: list[dict] = field(default_factory=list)
    summary: list[dict] = field(default_factory=list)

    def costs(self, size, algorithm) -> list[int]:
        return [r["best_cost"] for r in self.runs
                if r["size"] == size and r["algorithm"] == algorithm]

    def row(self, size, algorithm) -> dict:
        for r in self.summary:
            if r["size"] == size and r["algorithm"] == algorithm:
                return r
        raise KeyError((size, algorithm))


def _one_run(spec: ExperimentSpec, size, run) -> list[dict]:
    net = spec.network(size, run)
    seed = spec.base_seed + run
    greedy_alg = f"greedy-k{spec.k}"
    greedy = greedy_search(net, GreedyConfig(k=spec.k, seed=seed))
    target = greedy.evaluations_used["full_evaluations"]
    out = []

    def record(alg, res):
        out.append({"size": size, "run": run, "algorithm": alg, "edges": net.n_edges,
                    "best_cost": res.best_cost,
                    "full_evaluations": res.evaluations_used["full_evaluations"],
                    "budget": target, "sequence": res.best_sequence})

    for alg in spec.algorithms:
        if alg in ("greedy", greedy_alg):
            record(greedy_alg, greedy)
        elif alg in STOCHASTIC:
            if net.n_edges < 2:
                record(alg, greedy)
                continue
            record(alg, make_search(alg, net, seed).advance(target).result())
        elif alg == "exhaustive":
            if 0 < net.n_edges <= spec.exhaustive_max_edges:
                # deterministic: a fixed instance needs only one run
                if run == 0 or (spec.family == "er" and not spec.fixed_instance):
                    record(alg, exhaustive_search(net, force=True))
        else:
            raise ValueError(f"unknown algorithm {alg!r}")
    return out


def _worker(args):
    return _one_run(*args)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("TNOPT_THREADS", "1")))
    except ValueError:
        return 1


def run_equal_budget(spec: ExperimentSpec, threads: int | None = None) -> RunSummary:
    """Greedy sets the per-run budget that GA and SA then receive.

    Results are gathered by ``(size, run)`` so output does not depend on the
    completion order of parallel workers.
    """
    threads = thread_count() if threads is None else threads
    tasks = [(spec, size, run) for size in spec.sizes for run in range(spec.runs)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_worker, tasks))
    else:
        results = [_worker(t) for t in tasks]
    runs = [row for chunk in results for row in chunk]
    runs.sort(key=lambda r: (r["size"], r["run"], r["algorithm"]))
    summary = []
    algs = sorted({r["algorithm"] for r in runs})
    for size in spec.sizes:
        for alg in algs:
            rows = [r for r in runs if r["size"] == size and r["algorithm"] == alg]
            if not rows:
                continue
            med, lstd = compute_stats([r["best_cost"] for r in rows])
            evals = sorted(r["full_evaluations"] for r in rows)
            summary.append({"size": size, "algorithm": alg, "runs": len(rows),
                            "median_cost": med, "log_std": lstd,
                            "median_full_evaluations": evals[(len(evals) - 1) // 2]})
    return RunSummary(runs, summary)


def summary_csv(result: RunSummary) -> str:
    buf = io.StringIO()
    buf.write("# median: lower median over runs; log_std: sample std of log10(cost)\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["size", "algorithm", "runs", "median_cost", "log10_median_cost",
                "log_std", "median_full_evaluations"])
    for r in result.summary:
        w.writerow([r["size"], r["algorithm"], r["runs"], r["median_cost"],
                    f"{log10_int(r['median_cost']):.6f}", f"{r['log_std']:.6f}",
                    f"{r['median_full_evaluations']:.6f}"])
    w.writerow(["", "desktop-limit", "", DESKTOP_LIMIT, f"{log10_int(DESKTOP_LIMIT):.6f}", "", ""])
    return buf.getvalue()


def runs_csv(result: RunSummary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["size", "run", "algorithm", "edges", "best_cost", "log10_best_cost",
                "full_evaluations", "budget", "sequence"])
    for r in result.runs:
        w.writerow([r["size"], r["run"], r["algorithm"], r["edges"], r["best_cost"],
                    f"{log10_int(r['best_cost']):.6f}", f"{r['full_evaluations']:.6f}",
                    f"{r['budget']:.6f}", " ".join(map(str, r["sequence"]))])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Per-step traces


def _graph_dict(net: TensorNetwork) -> dict:
    d = net.to_dict()
    return {"vertices": d["vertices"], "edges": d["edges"], "open_legs": d["open_legs"]}


def to_dot(net: TensorNetwork, name: str, next_edge: int | None = None) -> str:
    """DOT graph of ``net``; each edge carries the cost of contracting it now."""
    eng = Contractor(net)
    state = eng.initial_state()
    lines = [f"graph {name} {{"]
    for v in sorted(net.vertices):
        legs = [str(i) for i, g in sorted(net.open_legs.items()) if g.vertex == v]
        attr = f' [open_legs="{",".join(legs)}"]' if legs else ""
        lines.append(f"  v{v}{attr};")
    for eid, e in sorted(net.edges.items()):
        cost = eng.step_cost(state, eng.bit_of[eid])
        attrs = [f"id={eid}", f"chi={e.chi}", f'stepcost="{cost}"',
                 f"log10stepcost={log10_int(cost):.6f}", f'label="{eid}"']
        if eid == next_edge:
            attrs.append("next=true")
            attrs.append("penwidth=3")
        lines.append(f"  v{e.u} -- v{e.v} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_sequence_trace(net: TensorNetwork, seq, path) -> list[Path]:
    """Write ``trace.json`` and one DOT file per contraction state.

    ``step_000.dot`` is the initial network; ``step_{k}.dot`` is the network
    after ``k`` contractions, so the last file is the final state.
    """
    _check(net, seq)
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    width = max(3, len(str(len(seq))))
    files = []
    steps = []
    total = 0
    cur = net
    for k, e in enumerate(seq):
        dot = out / f"step_{k:0{width}d}.dot"
        dot.write_text(to_dot(cur, f"step_{k}", next_edge=e))
        files.append(dot)
        cur, cost = contract_step(cur, e)
        total += cost
        steps.append({"step": k + 1, "edge": e, "step_cost": cost, "accumulated_cost": total,
                      "log10_step_cost": log10_int(cost), "graph": _graph_dict(cur)})
    dot = out / f"step_{len(seq):0{width}d}.dot"
    dot.write_text(to_dot(cur, f"step_{len(seq)}"))
    files.append(dot)
    doc = {"network": net.to_dict(), "sequence": list(seq), "total_cost": total,
           "log10_total_cost": log10_int(total), "steps": steps}
    trace = out / "trace.json"
    trace.write_text(json.dumps(doc, indent=1) + "\n")
    return [trace] + files
