"""Path-generated cones: budget max-flow, concurrent flow, weighted multicommodity flow.

Costs handed to the oracles are the engine's reduced costs, hence positive.
The generic Dijkstra works on any ordered number type; float arrays on simple
digraphs take a :mod:`scipy.sparse.csgraph` shortcut, which matters for the
tens of thousands of oracle calls a large max-flow run makes.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as csgraph_dijkstra

from ..errors import InvalidInstance, NoPath
from ..instance import Generator, to_fraction
from ..oracles import Certificate, Level, Oracle
from ..solve import SolveResult, solve
from .common import ExtraRow, budget_row, build_instance
from .graphs import Commodity, Digraph

__all__ = [
    "shortest_path_tree",
    "path_edges",
    "dijkstra_path",
    "dijkstra_path_oracle",
    "PathOracle",
    "solve_budget_maxflow",
    "budget_maxflow_instance",
    "concurrent_instance",
    "weighted_mcf_instance",
    "ConcurrentOracle",
    "concurrent_oracle",
    "solve_concurrent",
    "WeightedMCFOracle",
    "weighted_mcf_oracle",
    "solve_weighted_mcf",
]


def shortest_path_tree(graph: Digraph, d: Sequence, source: int):
    """Dijkstra from ``source``; returns ``(dist, pred_edge)`` with ``None`` for unreached nodes.

    Ties are broken towards the smaller node index (heap order) and, at equal
    distance, the first edge that reached a node keeps it.
    """
    out = graph.out_edges()
    dist = [None] * graph.num_nodes
    pred = [None] * graph.num_nodes
    done = [False] * graph.num_nodes
    dist[source] = d[0] * 0 if len(d) else 0
    heap = [(dist[source], source)]
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for idx in out[u]:
            v = graph.edges[idx].head
            if done[v]:
                continue
            nd = du + d[idx]
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
                pred[v] = idx
                heapq.heappush(heap, (nd, v))
    return dist, pred


def path_edges(graph: Digraph, pred, source: int, sink: int) -> list[int]:
    if sink != source and pred[sink] is None:
        raise NoPath(f"node {sink} is unreachable from {source}")
    path = []
    v = sink
    while v != source:
        idx = pred[v]
        path.append(idx)
        v = graph.edges[idx].tail
    path.reverse()
    return path


class _FastTrees:
    """Shortest-path trees for float costs on a digraph without parallel edges."""

    def __init__(self, graph: Digraph):
        n = graph.num_nodes
        order = sorted(range(graph.num_edges), key=lambda e: (graph.edges[e].tail, graph.edges[e].head))
        self.order = np.array(order, dtype=np.int64)
        self.indices = np.array([graph.edges[e].head for e in order], dtype=np.int32)
        counts = np.bincount([graph.edges[e].tail for e in order], minlength=n)
        self.indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int32)
        self.edge_of = {(graph.edges[e].tail, graph.edges[e].head): e for e in order}
        self.n = n

    def tree(self, d: np.ndarray, source: int):
        weights = np.asarray(d, dtype=float)[self.order]
        mat = csr_matrix((weights, self.indices, self.indptr), shape=(self.n, self.n))
        dist, pred = csgraph_dijkstra(mat, directed=True, indices=source, return_predecessors=True)
        return dist, pred

    def path(self, pred, source: int, sink: int) -> list[int]:
        if sink != source and pred[sink] < 0:
            raise NoPath(f"node {sink} is unreachable from {source}")
        path = []
        v = sink
        while v != source:
            u = int(pred[v])
            path.append(self.edge_of[(u, v)])
            v = u
        path.reverse()
        return path


def _is_simple(graph: Digraph) -> bool:
    pairs = {(e.tail, e.head) for e in graph.edges}
    return len(pairs) == graph.num_edges and all(e.tail != e.head for e in graph.edges)


class _TreeSource:
    """Picks the generic or the csgraph Dijkstra per call."""

    def __init__(self, graph: Digraph):
        self.graph = graph
        self.fast = _FastTrees(graph) if _is_simple(graph) and graph.num_edges else None
        self.computations = 0

    def paths(self, d, source: int, sinks: Sequence[int]):
        """Distances and edge lists to each of ``sinks``; ``None`` entries when unreachable."""
        self.computations += 1
        results = []
        if self.fast is not None and isinstance(d, np.ndarray) and d.dtype.kind == "f":
            dist, pred = self.fast.tree(d, source)
            for t in sinks:
                if not np.isfinite(dist[t]):
                    results.append(None)
                else:
                    results.append((float(dist[t]), self.fast.path(pred, source, t)))
            return results
        dist, pred = shortest_path_tree(self.graph, d, source)
        for t in sinks:
            if dist[t] is None:
                results.append(None)
            else:
                results.append((dist[t], path_edges(self.graph, pred, source, t)))
        return results


def dijkstra_path(graph: Digraph, d: Sequence, source: int, sink: int) -> tuple[object, list[int]]:
    dist, pred = shortest_path_tree(graph, d, source)
    return dist[sink], path_edges(graph, pred, source, sink)


def dijkstra_path_oracle(graph: Digraph, d: Sequence, source: int | None = None, sink: int | None = None) -> Generator:
    """Unit flow on a cheapest ``s``-``t`` path."""
    s = graph.source if source is None else source
    t = graph.sink if sink is None else sink
    _, edges = dijkstra_path(graph, d, s, t)
    return Generator((e, 1) for e in edges)


class PathOracle(Oracle):
    """Minimizing oracle over unit ``s``-``t`` path flows (edge columns first)."""

    level = Level.MINIMIZING

    def __init__(self, graph: Digraph, source: int | None = None, sink: int | None = None):
        self.graph = graph
        self.source = graph.source if source is None else source
        self.sink = graph.sink if sink is None else sink
        if self.source is None or self.sink is None:
            raise InvalidInstance("path oracle needs a source and a sink")
        self.trees = _TreeSource(graph)

    def query(self, d):
        (hit,) = self.trees.paths(d, self.source, [self.sink])
        if hit is None:
            raise NoPath(f"node {self.sink} is unreachable from {self.source}")
        dist, edges = hit
        return Certificate(Generator((e, 1) for e in edges), dist)


def solve_budget_maxflow(graph: Digraph, budget, epsilon, *, extra_rows: Sequence[ExtraRow] = (),
                         record_steps: bool = False) -> SolveResult:
    """Max ``s``-``t`` flow subject to capacities and ``sum fee_e x_e <= budget``.

    A flow is measured on the edges entering ``t``, so every unit path flow
    has objective exactly one and the uniform-cost loop applies.
    """
    instance = budget_maxflow_instance(graph, budget, extra_rows)
    return solve(instance, PathOracle(graph), epsilon, uniform_cost=1, record_steps=record_steps)


def budget_maxflow_instance(graph: Digraph, budget, extra_rows: Sequence[ExtraRow] = ()):
    if graph.source is None or graph.sink is None:
        raise InvalidInstance("budget max-flow needs a source and a sink")
    costs = [1 if e.head == graph.sink else 0 for e in graph.edges]
    rows = budget_row([e.fee for e in graph.edges], budget) + list(extra_rows)
    return build_instance(graph.num_edges, [e.capacity for e in graph.edges], costs, rows)


def _out_capacity(graph: Digraph, v: int) -> Fraction:
    return sum((e.capacity for e in graph.edges if e.tail == v), Fraction(0))


def _group_by_source(commodities: Sequence[Commodity]) -> dict[int, list[int]]:
    groups: dict[int, list[int]] = {}
    for j, com in enumerate(commodities):
        groups.setdefault(com.source, []).append(j)
    return groups


class ConcurrentOracle(Oracle):
    """Minimizing oracle over basic components of a concurrent flow.

    A component routes ``d_j`` units of every commodity on one path each, plus
    one unit on the trailing counter column that records how many components
    were packed.  Commodities sharing a source share one shortest-path tree.
    """

    level = Level.MINIMIZING

    def __init__(self, graph: Digraph, commodities: Sequence[Commodity]):
        if not commodities:
            raise InvalidInstance("at least one commodity is required")
        self.graph = graph
        self.commodities = list(commodities)
        self.groups = _group_by_source(self.commodities)
        self.counter = graph.num_edges
        self.trees = _TreeSource(graph)

    def query(self, d):
        flow: dict[int, Fraction] = {self.counter: Fraction(1)}
        for source, members in self.groups.items():
            hits = self.trees.paths(d, source, [self.commodities[j].sink for j in members])
            for j, hit in zip(members, hits):
                if hit is None:
                    raise NoPath(f"commodity {j} has no path")
                demand = self.commodities[j].demand
                for e in hit[1]:
                    flow[e] = flow.get(e, Fraction(0)) + demand
        g = Generator(flow)
        return Certificate(g, g.dot(d))


def concurrent_oracle(graph: Digraph, commodities: Sequence[Commodity], d) -> Generator:
    """Edge part of a cheapest basic component (counter column dropped)."""
    g = ConcurrentOracle(graph, commodities)(list(d) + [0]).generator
    return Generator((j, v) for j, v in g.items() if j < graph.num_edges)


def solve_concurrent(graph: Digraph, commodities: Sequence[Commodity], epsilon, *,
                     extra_rows: Sequence[ExtraRow] = (), record_steps: bool = False) -> SolveResult:
    """Max ``lam`` such that ``lam * d_j`` of every commodity can be routed together.

    The counter column carries ``lam``; its row ``lam <= min_j out(s_j) / d_j``
    never binds, since commodity ``j`` cannot ship more than its source emits.
    """
    instance = concurrent_instance(graph, commodities, extra_rows)
    return solve(instance, ConcurrentOracle(graph, commodities), epsilon, uniform_cost=1,
                 record_steps=record_steps)


def concurrent_instance(graph: Digraph, commodities: Sequence[Commodity], extra_rows: Sequence[ExtraRow] = ()):
    cap = min(_out_capacity(graph, com.source) / com.demand for com in commodities)
    if cap <= 0:
        raise NoPath("some commodity source has no outgoing edge")
    counter = graph.num_edges
    costs = [0] * graph.num_edges + [1]
    rows = [({counter: 1}, cap)] + list(extra_rows)
    return build_instance(graph.num_edges + 1, [e.capacity for e in graph.edges], costs, rows)


class WeightedMCFOracle(Oracle):
    """Minimizing oracle over flows of value ``1/c_j`` on one ``(s_j, t_j)`` path.

    Column ``num_edges + j`` counts the flow of commodity ``j``; it has
    objective coefficient ``c_j``, so every generator has objective one.
    """

    level = Level.MINIMIZING

    def __init__(self, graph: Digraph, commodities: Sequence[Commodity]):
        if not commodities:
            raise InvalidInstance("at least one commodity is required")
        self.graph = graph
        self.commodities = list(commodities)
        self.groups = _group_by_source(self.commodities)
        self.trees = _TreeSource(graph)

    def query(self, d):
        best = None
        for source, members in self.groups.items():
            hits = self.trees.paths(d, source, [self.commodities[j].sink for j in members])
            for j, hit in zip(members, hits):
                if hit is None:
                    raise NoPath(f"commodity {j} has no path")
                share = 1 / self.commodities[j].weight
                scaled = (hit[0] + d[self.graph.num_edges + j]) * share
                if best is None or scaled < best[0] or (scaled == best[0] and j < best[1]):
                    best = (scaled, j, hit[1])
        scaled, j, edges = best
        share = Fraction(1) / self.commodities[j].weight
        entries = [(e, share) for e in edges] + [(self.graph.num_edges + j, share)]
        return Certificate(Generator(entries), scaled)


def weighted_mcf_oracle(graph: Digraph, commodities: Sequence[Commodity], d) -> Generator:
    """Edge part of the cheapest scaled path (counter columns dropped)."""
    padded = list(d) + [0] * len(commodities)
    g = WeightedMCFOracle(graph, commodities)(padded).generator
    return Generator((j, v) for j, v in g.items() if j < graph.num_edges)


def solve_weighted_mcf(graph: Digraph, commodities: Sequence[Commodity], epsilon, *,
                       extra_rows: Sequence[ExtraRow] = (), record_steps: bool = False) -> SolveResult:
    """Max ``sum_j c_j f_j`` over multicommodity flows within the capacities.

    Counter column ``j`` holds ``f_j``; its row ``f_j <= out(s_j)`` never binds.
    """
    instance = weighted_mcf_instance(graph, commodities, extra_rows)
    return solve(instance, WeightedMCFOracle(graph, commodities), epsilon, uniform_cost=1,
                 record_steps=record_steps)


def weighted_mcf_instance(graph: Digraph, commodities: Sequence[Commodity], extra_rows: Sequence[ExtraRow] = ()):
    commodities = list(commodities)
    m = graph.num_edges
    costs = [0] * m + [com.weight for com in commodities]
    rows = []
    for j, com in enumerate(commodities):
        cap = _out_capacity(graph, com.source)
        if cap <= 0:
            raise NoPath(f"commodity {j} source has no outgoing edge")
        rows.append(({m + j: 1}, cap))
    rows += list(extra_rows)
    return build_instance(m + len(commodities), [e.capacity for e in graph.edges], costs, rows)
