"""Cycle-generated cones: minimum mean cycles and budget-constrained circulations."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..errors import NoCycle
from ..instance import Generator, to_fraction
from ..oracles import ALL_NON_NEGATIVE, Certificate, Level, Oracle
from ..solve import SolveResult, solve
from .common import ExtraRow, budget_row, build_instance
from .graphs import Digraph

__all__ = ["karp_min_mean_cycle", "KarpOracle", "solve_budget_mincost", "budget_mincost_instance", "cycle_generator"]


def _lift(d):
    # floats become the rationals they denote; affine values pass through
    return [to_fraction(v) if isinstance(v, (float, int)) or type(v).__module__ == "numpy" else v for v in d]


def karp_min_mean_cycle(graph: Digraph, d: Sequence) -> tuple[list[int], object]:
    """A cycle of minimum mean cost and that mean, by Karp's walk recurrence.

    ``D[k][v]`` is the cheapest walk of exactly ``k`` edges ending in ``v``
    (walks may start anywhere).  The minimizing node's ``n``-edge walk is
    traced back through the stored predecessor edges; the first node that
    repeats closes a cycle, and every cycle on that walk attains the minimum
    mean.
    """
    n = graph.num_nodes
    d = _lift(d)
    zero = d[0] * 0 if d else Fraction(0)
    D = [[zero] * n] + [[None] * n for _ in range(n)]
    pred = [[None] * n for _ in range(n + 1)]
    for k in range(1, n + 1):
        prev, cur, pk = D[k - 1], D[k], pred[k]
        for idx, e in enumerate(graph.edges):
            base = prev[e.tail]
            if base is None:
                continue
            cand = base + d[idx]
            if cur[e.head] is None or cand < cur[e.head]:
                cur[e.head] = cand
                pk[e.head] = idx
    best = None
    for v in range(n):
        if D[n][v] is None:
            continue
        worst = None
        for k in range(n):
            if D[k][v] is None:
                continue
            val = (D[n][v] - D[k][v]) * Fraction(1, n - k)
            if worst is None or val > worst:
                worst = val
        if best is None or worst < best[0]:
            best = (worst, v)
    if best is None:
        raise NoCycle("the graph is acyclic")
    mean, v = best

    walk_nodes = [v]
    walk_edges = []
    for k in range(n, 0, -1):
        idx = pred[k][walk_nodes[-1]]
        walk_edges.append(idx)
        walk_nodes.append(graph.edges[idx].tail)
    # walk_nodes runs backwards in time; find the first repeat
    seen = {}
    for pos, node in enumerate(walk_nodes):
        if node in seen:
            start = seen[node]
            cycle = walk_edges[start:pos]
            cycle.reverse()
            return cycle, mean
        seen[node] = pos
    raise AssertionError("a walk with n edges must repeat a node")


def cycle_generator(edges: Sequence[int]) -> Generator:
    return Generator((e, 1) for e in edges)


class KarpOracle(Oracle):
    """Sign oracle over unit simple-cycle flows.

    A minimum mean cycle has cost of the same sign as the most negative cycle.
    Acyclic graphs report no violation.
    """

    level = Level.SIGN

    def __init__(self, graph: Digraph):
        self.graph = graph

    def query(self, d):
        try:
            cycle, _ = karp_min_mean_cycle(self.graph, d)
        except NoCycle:
            return ALL_NON_NEGATIVE
        g = cycle_generator(cycle)
        return Certificate(g, g.dot(_lift(d)))


def solve_budget_mincost(graph: Digraph, budget, epsilon, *, bound: str = "weak",
                         extra_rows: Sequence[ExtraRow] = (), record_steps: bool = False) -> SolveResult:
    """Maximize ``sum c_e x_e`` over circulations within capacities and the budget.

    This is the maximization form; a minimum-cost instance is solved by
    negating its costs.
    """
    instance = budget_mincost_instance(graph, budget, extra_rows)
    return solve(instance, KarpOracle(graph), epsilon, bound=bound, record_steps=record_steps)


def budget_mincost_instance(graph: Digraph, budget, extra_rows: Sequence[ExtraRow] = ()):
    rows = budget_row([e.fee for e in graph.edges], budget) + list(extra_rows)
    return build_instance(graph.num_edges, [e.capacity for e in graph.edges],
                          [e.cost for e in graph.edges], rows)
