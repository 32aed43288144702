"""Command-line front-end.

Exit codes: 0 success, 2 infeasible or malformed input, 64 usage error,
66 unreadable file.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from .apps import (
    FreeMatroid,
    GraphicMatroid,
    PartitionMatroid,
    ProcessingNetwork,
    UniformMatroid,
    parse_dimacs,
)
from .apps.cycles import budget_mincost_instance, solve_budget_mincost
from .apps.matroids import basepack_instance, solve_basepack
from .apps.paths import (
    budget_maxflow_instance,
    concurrent_instance,
    solve_budget_maxflow,
    solve_concurrent,
    solve_weighted_mcf,
    weighted_mcf_instance,
)
from .apps.processing import gpn_instance, solve_gpn
from .apps.trees import solve_treepack, treepack_instance
from .errors import ConePackError, FormatError
from .generators import random_connected_graph, random_digraph, random_explicit, random_flow_network
from .instance import PackingInstance, format_fraction, to_fraction
from .oracles import ExplicitSet
from .solve import solve
from .verify import (
    check_feasible,
    enumerate_cycles,
    enumerate_paths,
    enumerate_trees,
    exact_simplex,
    explicit_lp,
)

EXIT_OK = 0
EXIT_DATA = 2
EXIT_USAGE = 64
EXIT_NOINPUT = 66

PROBLEMS = ("pack", "maxflow-budget", "mincost-budget", "gpn", "concurrent", "mcf-weighted", "treepack", "basepack")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _epsilon(text: str) -> Fraction:
    try:
        eps = to_fraction(text)
    except FormatError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < eps < 1:
        raise argparse.ArgumentTypeError(f"epsilon must lie strictly between 0 and 1, got {text}")
    return eps


def _eps_list(text: str) -> list[Fraction]:
    return [_epsilon(part) for part in text.split(",") if part]


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="conepack", description="Approximate packing over oracle-described cones.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, needs_input=True):
        p.add_argument("--eps", type=_epsilon, default=Fraction(1, 10), help="accuracy in (0, 1), default 0.1")
        p.add_argument("--input", required=needs_input, help="instance file")
        p.add_argument("--bound", choices=("weak", "parametric"), default="weak",
                       help="initial lower bound for signed objectives")
        p.add_argument("--trace", help="write the step log as JSON to this path")
        p.add_argument("--output", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=_seed, default=0)

    for name in PROBLEMS:
        p = sub.add_parser(name, help=f"solve a {name} instance")
        common(p)
        if name == "gpn":
            p.add_argument("--objective", choices=("max-flow", "min-cost"), default="max-flow")
        if name in ("treepack", "basepack"):
            p.add_argument("--weighted", action="store_true", help="use edge costs (or JSON weights) as weights")
        if name == "mincost-budget":
            p.add_argument("--return-arc", action="store_true",
                           help="close an s-t instance into a circulation with a zero-cost t->s arc")

    p = sub.add_parser("verify", help="check a solution report against its instance")
    common(p)
    p.add_argument("--solution", required=True, help="JSON report produced by a solve command")
    p.add_argument("--kind", choices=PROBLEMS, default="pack")
    p.add_argument("--objective", choices=("max-flow", "min-cost"), default="max-flow")
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--return-arc", action="store_true")

    p = sub.add_parser("bench", help="seeded random instances, one CSV row per run")
    common(p, needs_input=False)
    p.add_argument("--eps-list", type=_eps_list, default=_eps_list("0.5,0.2,0.1"))
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--problems", default="pack,treepack,mincost-budget,maxflow-budget")
    return parser


# ---------------------------------------------------------------- loading

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _load_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _load_pack(path: str) -> tuple[PackingInstance, ExplicitSet]:
    data = _load_json(path)
    instance = PackingInstance.from_dict(data)
    if "generators" not in data:
        raise FormatError("a pack instance needs an explicit 'generators' list")
    return instance, ExplicitSet.from_dict(data, instance.num_cols)


def _load_matroid(data) -> tuple[object, list | None, list | None]:
    try:
        desc = data["matroid"]
        kind = desc["type"]
        if kind == "uniform":
            matroid = UniformMatroid(int(desc["rank"]), int(desc["size"]))
        elif kind == "free":
            matroid = FreeMatroid(int(desc["size"]))
        elif kind == "partition":
            matroid = PartitionMatroid([int(b) for b in desc["blocks"]], [int(k) for k in desc["limits"]])
        elif kind == "graphic":
            from .apps import Graph

            matroid = GraphicMatroid(Graph(int(desc["nodes"]), [tuple(e) for e in desc["edges"]]))
        else:
            raise FormatError(f"unknown matroid type {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed matroid description: {exc}") from exc
    return matroid, data.get("capacities"), data.get("weights")


def prepare(kind: str, args) -> tuple[PackingInstance, callable, dict]:
    """The packing instance for ``kind`` and a zero-argument solver for it."""
    eps = args.eps
    bound = args.bound
    record = bool(getattr(args, "trace", None))
    extra: dict = {}
    if kind == "pack":
        instance, oracle = _load_pack(args.input)
        extra["generators"] = len(oracle)
        return instance, lambda: solve(instance, oracle, eps, bound=bound, record_steps=record), extra

    if kind == "basepack" and args.input.endswith(".json"):
        matroid, caps, weights = _load_matroid(_load_json(args.input))
        if not args.weighted:
            weights = None
        instance = basepack_instance(matroid, caps, weights)
        return instance, lambda: solve_basepack(matroid, eps, caps, weights, bound=bound, record_steps=record), extra

    problem = parse_dimacs(_read(args.input))
    g = problem.graph
    if kind == "maxflow-budget":
        instance = budget_maxflow_instance(g, problem.budget)
        return instance, lambda: solve_budget_maxflow(g, problem.budget, eps, record_steps=record), extra
    if kind == "mincost-budget":
        if args.return_arc:
            if g.source is None or g.sink is None:
                raise FormatError("--return-arc needs 'n <id> s' and 'n <id> t' lines")
            out_cap = sum((e.capacity for e in g.edges if e.tail == g.source), Fraction(0))
            g.add_edge(g.sink, g.source, max(out_cap, Fraction(1)), 0, 0)
            extra["return_arc"] = g.num_edges - 1
        instance = budget_mincost_instance(g, problem.budget)
        return instance, lambda: solve_budget_mincost(g, problem.budget, eps, bound=bound, record_steps=record), extra
    if kind == "gpn":
        network = ProcessingNetwork(g, problem.alpha)
        instance = gpn_instance(network, args.objective)
        return instance, lambda: solve_gpn(network, eps, args.objective, bound=bound, record_steps=record), extra
    if kind == "concurrent":
        instance = concurrent_instance(g, problem.commodities)
        return instance, lambda: solve_concurrent(g, problem.commodities, eps, record_steps=record), extra
    if kind == "mcf-weighted":
        instance = weighted_mcf_instance(g, problem.commodities)
        return instance, lambda: solve_weighted_mcf(g, problem.commodities, eps, record_steps=record), extra
    if kind == "treepack":
        graph = problem.undirected()
        weights = [e.cost for e in graph.edges] if args.weighted else None
        instance = treepack_instance(graph, None, weights)
        return instance, lambda: solve_treepack(graph, eps, None, weights, bound=bound, record_steps=record), extra
    if kind == "basepack":
        graph = problem.undirected()
        weights = [e.cost for e in graph.edges] if args.weighted else None
        caps = [e.capacity for e in graph.edges]
        matroid = GraphicMatroid(graph)
        instance = basepack_instance(matroid, caps, weights)
        return instance, lambda: solve_basepack(matroid, eps, caps, weights, bound=bound, record_steps=record), extra
    raise UsageError(f"unknown problem {kind!r}")


# ---------------------------------------------------------------- reports

def _lambda_summary(lower: list[float]) -> dict:
    if not lower:
        return {"count": 0, "first": None, "last": None}
    return {"count": len(lower), "first": lower[0], "last": lower[-1]}


def build_report(kind: str, eps, result, wall: float, extra: dict | None = None) -> dict:
    sol = result.solution
    report = {
        "problem": kind,
        "eps": format_fraction(to_fraction(eps)),
        "mode": result.mode,
        "objective": sol.objective,
        "feasible": bool(sol.feasible),
        "worst_violation": format_fraction(sol.worst_violation),
        "iterations": sol.iterations,
        "augment_steps": sol.augment_steps,
        "bound_raises": sol.bound_raises,
        "oracle_calls": sol.oracle_calls,
        "initial_lower": result.initial_lower,
        "bound_probes": result.bound_probes,
        "lambda_trace": _lambda_summary(result.log.lambda_lower),
        "wall_time_s": round(wall, 6),
        "x": [float(v) for v in np.asarray(sol.x).tolist()],
    }
    if extra:
        report.update(extra)
    return report


SCALAR_FIELDS = ("problem", "eps", "mode", "objective", "feasible", "worst_violation", "iterations",
                 "augment_steps", "bound_raises", "oracle_calls", "initial_lower", "bound_probes", "wall_time_s")


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCALAR_FIELDS)
    writer.writerow([report.get(k) for k in SCALAR_FIELDS])
    return buf.getvalue()


# ---------------------------------------------------------------- commands

def cmd_solve(kind: str, args) -> int:
    _, run, extra = prepare(kind, args)
    start = time.perf_counter()
    result = run()
    wall = time.perf_counter() - start
    report = build_report(kind, args.eps, result, wall, extra)
    if args.trace:
        Path(args.trace).write_text(json.dumps(result.log.to_dict(), indent=1) + "\n")
    sys.stdout.write(render(report, args.output))
    return EXIT_OK if result.solution.feasible else EXIT_DATA


def cmd_verify(args) -> int:
    instance, _, _ = prepare(args.kind, args)
    report = _load_json(args.solution)
    try:
        x = [to_fraction(v) for v in report["x"]]
    except (KeyError, TypeError) as exc:
        raise FormatError("solution file needs an 'x' list") from exc
    if len(x) != instance.num_cols:
        raise FormatError(f"solution has {len(x)} entries, instance has {instance.num_cols} columns")
    feasible, worst = check_feasible(instance, x)
    value = sum((c * v for c, v in zip(instance.costs, x)), Fraction(0))
    out = {
        "feasible": feasible,
        "worst_violation": format_fraction(worst),
        "objective": float(value),
    }
    if args.kind == "pack":
        _, oracle = _load_pack(args.input)
        opt = exact_simplex(explicit_lp(instance, oracle.generators)).value
        out["exact_optimum"] = format_fraction(opt)
        out["ratio"] = float(value / opt) if opt else None
    sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if feasible else EXIT_DATA


def _bench_cases(problem: str, rng: random.Random):
    """``(solver(eps), exact optimum or None)`` for one random instance."""
    if problem == "pack":
        instance, oracle = random_explicit(rng)
        opt = exact_simplex(explicit_lp(instance, oracle.generators)).value
        return (lambda eps: solve(instance, oracle, eps)), opt
    if problem == "treepack":
        graph = random_connected_graph(rng, rng.randint(3, 6), rng.randint(1, 6))
        instance = treepack_instance(graph)
        opt = exact_simplex(explicit_lp(instance, enumerate_trees(graph))).value
        return (lambda eps: solve_treepack(graph, eps)), opt
    if problem == "mincost-budget":
        g = random_digraph(rng, rng.randint(2, 5), rng.randint(3, 9))
        budget = Fraction(rng.randint(1, 20))
        instance = budget_mincost_instance(g, budget)
        cycles = enumerate_cycles(g)
        positive = [c for c in cycles if c.dot(instance.costs) > 0]
        opt = exact_simplex(explicit_lp(instance, positive)).value if positive else Fraction(0)
        return (lambda eps: solve_budget_mincost(g, budget, eps)), opt
    if problem == "maxflow-budget":
        n = rng.randint(3, 6)
        g, budget = random_flow_network(rng, n, rng.randint(n, min(12, n * (n - 1))), max_capacity=10, max_fee=5)
        instance = budget_maxflow_instance(g, budget)
        opt = exact_simplex(explicit_lp(instance, enumerate_paths(g, g.source, g.sink))).value
        return (lambda eps: solve_budget_maxflow(g, budget, eps)), opt
    raise UsageError(f"bench does not know problem {problem!r}")


def cmd_bench(args) -> int:
    rng = random.Random(args.seed)
    problems = [p for p in args.problems.split(",") if p]
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["problem", "instance", "eps", "objective", "exact_optimum", "ratio",
                     "iterations", "oracle_calls", "time_s"])
    for problem in problems:
        for idx in range(args.count):
            run, opt = _bench_cases(problem, rng)
            for eps in args.eps_list:
                start = time.perf_counter()
                result = run(eps)
                wall = time.perf_counter() - start
                sol = result.solution
                ratio = sol.objective / float(opt) if opt else (1.0 if sol.objective == 0 else math.nan)
                writer.writerow([problem, idx, format_fraction(eps), repr(sol.objective),
                                 "" if opt is None else format_fraction(opt), f"{ratio:.6f}",
                                 sol.iterations, sol.oracle_calls, f"{wall:.4f}"])
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "bench":
            return cmd_bench(args)
        return cmd_solve(args.command, args)
    except FileNotFoundError as exc:
        print(f"conepack: {exc}", file=sys.stderr)
        return EXIT_NOINPUT
    except UsageError as exc:
        print(f"conepack: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConePackError, ValueError) as exc:
        print(f"conepack: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
