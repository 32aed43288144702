"""Fractional spanning-tree packing."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..errors import Disconnected, InvalidInstance
from ..instance import Generator, to_fraction
from ..oracles import Certificate, Level, Oracle
from ..solve import SolveResult, solve
from .common import ExtraRow, build_instance
from .graphs import Graph

__all__ = ["DisjointSets", "kruskal", "mst_oracle", "TreeOracle", "solve_treepack", "treepack_instance"]


class DisjointSets:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, u: int, v: int) -> bool:
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return False
        if self.rank[ru] < self.rank[rv]:
            ru, rv = rv, ru
        self.parent[rv] = ru
        if self.rank[ru] == self.rank[rv]:
            self.rank[ru] += 1
        return True


def kruskal(graph: Graph, d: Sequence) -> list[int]:
    """Edge ids of a minimum spanning tree; ties go to the smaller edge id."""
    order = sorted(range(graph.num_edges), key=lambda e: (d[e], e))
    sets = DisjointSets(graph.num_nodes)
    tree = []
    for e in order:
        edge = graph.edges[e]
        if sets.union(edge.tail, edge.head):
            tree.append(e)
            if len(tree) == graph.num_nodes - 1:
                break
    if len(tree) != graph.num_nodes - 1:
        raise Disconnected("the graph has no spanning tree")
    return sorted(tree)


def mst_oracle(graph: Graph, d: Sequence) -> Generator:
    return Generator((e, 1) for e in kruskal(graph, d))


class TreeOracle(Oracle):
    level = Level.MINIMIZING

    def __init__(self, graph: Graph):
        if graph.num_nodes < 2:
            raise InvalidInstance("tree packing needs at least two nodes")
        self.graph = graph

    def query(self, d):
        g = mst_oracle(self.graph, d)
        return Certificate(g, g.dot(d))


def solve_treepack(graph: Graph, epsilon, capacities: Sequence | None = None, weights: Sequence | None = None,
                   *, bound: str = "weak", extra_rows: Sequence[ExtraRow] = (),
                   record_steps: bool = False) -> SolveResult:
    """Pack spanning trees fractionally within edge capacities.

    Without weights every tree counts one, so the objective is
    ``sum x_e / (n - 1)``; with weights it is ``sum w_e x_e / (n - 1)``.
    ``capacities`` default to the graph's edge capacities.
    """
    instance = treepack_instance(graph, capacities, weights, extra_rows)
    oracle = TreeOracle(graph)
    if weights is None:
        return solve(instance, oracle, epsilon, uniform_cost=1, record_steps=record_steps)
    return solve(instance, oracle, epsilon, bound=bound, record_steps=record_steps)


def treepack_instance(graph: Graph, capacities: Sequence | None = None, weights: Sequence | None = None,
                      extra_rows: Sequence[ExtraRow] = ()):
    if not graph.is_connected():
        raise Disconnected("the graph has no spanning tree")
    caps = [e.capacity for e in graph.edges] if capacities is None else [to_fraction(u) for u in capacities]
    scale = Fraction(1, graph.num_nodes - 1)
    if weights is None:
        return build_instance(graph.num_edges, caps, [scale] * graph.num_edges, extra_rows)
    return build_instance(graph.num_edges, caps, [to_fraction(w) * scale for w in weights], extra_rows)
