"""Command line interface: ``tnopt gen|optimize|sweep|trace|verify|stats``."""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import sys
from pathlib import Path

import numpy as np

from . import harness
from .deterministic import SearchTooLarge
from .generators import (ErdosRenyiSpec, SquareSpec, erdos_renyi, load_network,
                         load_sequence, square_lattice)
from .network import NetworkError, validate_sequence
from .numeric import execute, max_relative_deviation, random_assignment


def _ints(text):
    return [int(x) for x in text.split(",") if x]


def _floats(text):
    return [float(x) for x in text.split(",") if x]


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def _sa_opts(args) -> dict:
    return {
        "initial_temp": args.initial_temp,
        "visit": args.visit,
        "accept": args.accept,
        "restart_temp_ratio": args.restart_ratio,
        "local_search": not args.no_local_search,
        "energy": args.energy,
        "population_size": args.pop,
        "mutation_rate": args.mutation,
    }


def cmd_gen(args):
    if args.family == "square":
        net = square_lattice(SquareSpec(args.L, args.chi))
    else:
        net = erdos_renyi(ErdosRenyiSpec(args.n, args.p, args.chi, args.seed))
    _emit(net.to_json() + "\n", args.out)


def cmd_optimize(args):
    net = load_network(args.net)
    opts = _sa_opts(args)
    if args.time_remaining:
        res = harness.time_remaining_run(net, args.alg, args.flops_per_eval, seed=args.seed,
                                         granule=args.granule,
                                         max_full_evaluations=args.budget, **opts)
    else:
        res = harness.run_algorithm(args.alg, net, seed=args.seed, budget=args.budget,
                                    k=args.k, force=args.force, **opts)
    _emit(_dump(res.to_dict()), args.out)


def cmd_sweep(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    algorithms = tuple(a for a in args.algorithms.split(",") if a)
    if args.mode == "variable":
        net = load_network(args.net)
        rows = harness.run_variable_budget(net, algorithms, _floats(args.budgets),
                                           seed=args.seed, k=args.k)
        (out / "variable_budget.csv").write_text(harness.variable_budget_csv(rows))
        return
    spec = harness.ExperimentSpec(
        family=args.family, sizes=tuple(_ints(args.sizes)) if args.sizes else (0,),
        chi=args.chi, algorithms=algorithms, runs=args.runs, base_seed=args.seed,
        p=args.p, k=args.k, fixed_instance=args.fixed_instance, network_file=args.net)
    result = harness.run_equal_budget(spec, threads=args.threads)
    (out / "summary.csv").write_text(harness.summary_csv(result))
    (out / "runs.csv").write_text(harness.runs_csv(result))


def cmd_trace(args):
    net = load_network(args.net)
    if args.seq:
        seq = load_sequence(args.seq)
    else:
        res = harness.run_algorithm(args.alg, net, seed=args.seed, budget=args.budget, k=args.k)
        seq = res.best_sequence
    problem = validate_sequence(net, seq)
    if problem:
        raise NetworkError(f"invalid sequence: {problem}")
    harness.export_sequence_trace(net, seq, args.out_dir)


def cmd_verify(args):
    net = load_network(args.net)
    rng = np.random.default_rng(args.seed)
    asg = random_assignment(net, args.seed)
    edges = net.edge_ids
    reference = execute(net, asg, edges)
    worst = 0.0
    for _ in range(args.orders):
        order = [edges[i] for i in rng.permutation(len(edges))]
        worst = max(worst, max_relative_deviation(reference, execute(net, asg, order)))
    ok = worst <= args.tolerance
    _emit(_dump({"orders": args.orders, "max_relative_deviation": worst,
                 "tolerance": args.tolerance, "ok": ok}), None)
    return 0 if ok else 1


def cmd_stats(args):
    costs = [int(c) for c in args.costs]
    if args.file:
        with open(args.file, newline="") as fh:
            rows = csv.DictReader(line for line in fh if not line.startswith("#"))
            groups = {}
            for r in rows:
                groups.setdefault((r["size"], r["algorithm"]), []).append(int(r["best_cost"]))
        out = []
        for (size, alg), cs in sorted(groups.items(), key=lambda kv: (int(kv[0][0]), kv[0][1])):
            med, lstd = harness.compute_stats(cs)
            out.append({"size": int(size), "algorithm": alg, "runs": len(cs),
                        "median": med, "log_std": lstd})
        _emit(_dump(out), None)
        return
    med, lstd = harness.compute_stats(costs)
    _emit(_dump({"median": med, "log_std": lstd}), None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tnopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a benchmark network")
    gsub = gen.add_subparsers(dest="family", required=True)
    sq = gsub.add_parser("square")
    sq.add_argument("--L", type=int, required=True)
    sq.add_argument("--chi", type=int, default=2)
    sq.add_argument("--out")
    er = gsub.add_parser("er")
    er.add_argument("--n", type=int, required=True)
    er.add_argument("--p", type=float, default=0.8)
    er.add_argument("--chi", type=int, default=2)
    er.add_argument("--seed", type=int, default=0)
    er.add_argument("--out")
    gen.set_defaults(func=cmd_gen)

    def search_opts(p):
        p.add_argument("--k", type=int, default=2, help="greedy lookahead depth")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=float, help="full evaluations (GA/SA)")
        p.add_argument("--pop", type=int, default=20)
        p.add_argument("--mutation", type=float, default=0.6)
        p.add_argument("--initial-temp", type=float, default=5230.0)
        p.add_argument("--visit", type=float, default=2.62)
        p.add_argument("--accept", type=float, default=-5.0)
        p.add_argument("--restart-ratio", type=float, default=2e-5)
        p.add_argument("--no-local-search", action="store_true")
        p.add_argument("--energy", choices=("log", "raw"), default="log")

    opt = sub.add_parser("optimize", help="run one optimizer on a network file")
    opt.add_argument("--alg", required=True, choices=("exhaustive", "greedy", "ga", "sa"))
    opt.add_argument("--net", required=True)
    search_opts(opt)
    opt.add_argument("--force", action="store_true", help="allow exhaustive search beyond the guard")
    opt.add_argument("--time-remaining", action="store_true")
    opt.add_argument("--flops-per-eval", type=float)
    opt.add_argument("--granule", type=float, default=10.0)
    opt.add_argument("--out")
    opt.set_defaults(func=cmd_optimize)

    sw = sub.add_parser("sweep", help="equal-budget or variable-budget experiments")
    sw.add_argument("--mode", choices=("equal", "variable"), default="equal")
    sw.add_argument("--family", choices=("square", "er", "file"), default="square")
    sw.add_argument("--sizes", default="2,3,4")
    sw.add_argument("--chi", type=int, default=2)
    sw.add_argument("--p", type=float, default=0.8)
    sw.add_argument("--algorithms", default="greedy,ga,sa")
    sw.add_argument("--runs", type=int, default=20)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--k", type=int, default=2)
    sw.add_argument("--fixed-instance", action="store_true")
    sw.add_argument("--net", help="network file (family=file or mode=variable)")
    sw.add_argument("--budgets", default="10,100,1000")
    sw.add_argument("--threads", type=int, help="defaults to $TNOPT_THREADS or 1")
    sw.add_argument("--out-dir", required=True)
    sw.set_defaults(func=cmd_sweep)

    tr = sub.add_parser("trace", help="export per-step JSON and DOT files")
    tr.add_argument("--net", required=True)
    tr.add_argument("--seq", help='sequence file {"order": [...]}')
    tr.add_argument("--alg", default="greedy", choices=("exhaustive", "greedy", "ga", "sa"))
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--budget", type=float)
    tr.add_argument("--k", type=int, default=2)
    tr.add_argument("--out-dir", required=True)
    tr.set_defaults(func=cmd_trace)

    ve = sub.add_parser("verify", help="check that random orders agree numerically")
    ve.add_argument("--net", required=True)
    ve.add_argument("--orders", type=int, default=10)
    ve.add_argument("--seed", type=int, default=0)
    ve.add_argument("--tolerance", type=float, default=1e-9)
    ve.set_defaults(func=cmd_verify)

    st = sub.add_parser("stats", help="lower median and log10 standard deviation")
    st.add_argument("costs", nargs="*")
    st.add_argument("--file", help="runs.csv written by sweep")
    st.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except (NetworkError, SearchTooLarge, ValueError, KeyError, OSError) as exc:
        print(f"tnopt: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
