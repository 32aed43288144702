"""Generalized processing networks and their basic flow distribution schemes.

At node ``v`` each outgoing edge ``e`` may take at most the fraction
``alpha_e`` of what leaves ``v``.  A basic scheme fixes the split ``beta`` at
every node with at most one edge strictly between ``0`` and ``alpha_e``; the
cone is generated by the unit ``s``-``t`` flows of such schemes.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from typing import Mapping, Sequence

from ..errors import CyclicNetwork, InfeasibleNode, InvalidInstance
from ..instance import Generator, to_fraction
from ..oracles import Certificate, Level, Oracle
from ..solve import SolveResult, solve
from .common import ExtraRow, build_instance
from .graphs import Digraph

__all__ = ["ProcessingNetwork", "SchemeResult", "scheme_oracle", "SchemeOracle", "solve_gpn", "gpn_instance"]


class ProcessingNetwork:
    """An acyclic digraph with per-edge ratios ``alpha_e`` in ``(0, 1]``.

    Nodes that lie on no ``s``-``t`` route are ignored; the remaining ones must
    be acyclic and, except for ``t``, have ratios summing to at least one.
    """

    def __init__(self, graph: Digraph, alpha: Mapping[int, object] | Sequence | None = None,
                 source: int | None = None, sink: int | None = None):
        self.graph = graph
        self.source = graph.source if source is None else source
        self.sink = graph.sink if sink is None else sink
        if self.source is None or self.sink is None:
            raise InvalidInstance("a processing network needs a source and a sink")
        if alpha is None:
            alpha = {}
        if not isinstance(alpha, Mapping):
            alpha = dict(enumerate(alpha))
        self.alpha = [to_fraction(alpha.get(e, 1)) for e in range(graph.num_edges)]
        for e, a in enumerate(self.alpha):
            if not 0 < a <= 1:
                raise InvalidInstance(f"alpha of edge {e} is {a}, outside (0, 1]")
        self._structure = None

    def active_structure(self):
        """``(order, out)``: active nodes in topological order and their active out-edges."""
        if self._structure is not None:
            return self._structure
        g = self.graph
        fwd = [[] for _ in range(g.num_nodes)]
        bwd = [[] for _ in range(g.num_nodes)]
        for e in g.edges:
            fwd[e.tail].append(e.head)
            bwd[e.head].append(e.tail)
        reach = _closure(fwd, self.source)
        coreach = _closure(bwd, self.sink)
        active = reach & coreach
        if self.sink not in active:
            raise InvalidInstance("the sink is not reachable from the source")
        out = {v: [] for v in active if v != self.sink}
        sorter = TopologicalSorter({v: () for v in active})
        for idx, e in enumerate(g.edges):
            if e.tail in active and e.head in active and e.tail != self.sink:
                out[e.tail].append((idx, e.head, self.alpha[idx]))
                sorter.add(e.head, e.tail)
        try:
            order = list(sorter.static_order())
        except CycleError as exc:
            raise CyclicNetwork("the active part of the network has a cycle") from exc
        # a deterministic order: sort by (longest-path depth, node)
        depth = {v: 0 for v in order}
        for v in order:
            for _, h, _ in out.get(v, ()):
                depth[h] = max(depth[h], depth[v] + 1)
        order.sort(key=lambda v: (depth[v], v))
        for v, edges in out.items():
            if sum((a for _, _, a in edges), Fraction(0)) < 1:
                raise InfeasibleNode(f"node {v} cannot pass on a unit of flow")
        self._structure = (order, out)
        return self._structure


def _closure(adj, start):
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


@dataclass(frozen=True)
class SchemeResult:
    beta: dict  # node -> {edge: beta_e}
    generator: Generator
    cost: object


def scheme_oracle(network: ProcessingNetwork, d: Sequence) -> SchemeResult:
    """Cheapest unit flow over basic schemes, by a reverse-topological greedy fill."""
    order, out = network.active_structure()
    mu = {network.sink: d[0] * 0 if len(d) else Fraction(0)}
    beta = {}
    for v in reversed(order):
        if v == network.sink:
            continue
        ranked = sorted(((d[e] + mu[h], e, a) for e, h, a in out[v]), key=lambda t: (t[0], t[1]))
        rest = Fraction(1)
        split = {}
        total = None
        for value, e, a in ranked:
            if rest == 0:
                break
            take = a if a <= rest else rest
            split[e] = take
            rest -= take
            total = value * take if total is None else total + value * take
        beta[v] = split
        mu[v] = total

    heads = {e: h for edges in out.values() for e, h, _ in edges}
    inflow = {network.source: Fraction(1)}
    flow = {}
    for v in order:
        amount = inflow.get(v)
        if not amount or v == network.sink:
            continue
        for e, b in beta[v].items():
            flow[e] = amount * b
            inflow[heads[e]] = inflow.get(heads[e], Fraction(0)) + amount * b
    return SchemeResult(beta, Generator(flow), mu[network.source])


class SchemeOracle(Oracle):
    level = Level.MINIMIZING

    def __init__(self, network: ProcessingNetwork):
        self.network = network
        network.active_structure()

    def query(self, d):
        res = scheme_oracle(self.network, d)
        return Certificate(res.generator, res.cost)


def solve_gpn(network: ProcessingNetwork, epsilon, objective: str = "max-flow", *, bound: str = "weak",
              extra_rows: Sequence[ExtraRow] = (), record_steps: bool = False) -> SolveResult:
    """Max-flow (value into ``t``) or max ``sum c_e x_e`` over scheme flows within capacities.

    Edges outside the active part of the network keep their capacity rows but
    never carry flow.
    """
    instance = gpn_instance(network, objective, extra_rows)
    oracle = SchemeOracle(network)
    if objective == "max-flow":
        return solve(instance, oracle, epsilon, uniform_cost=1, record_steps=record_steps)
    return solve(instance, oracle, epsilon, bound=bound, record_steps=record_steps)


def gpn_instance(network: ProcessingNetwork, objective: str = "max-flow", extra_rows: Sequence[ExtraRow] = ()):
    g = network.graph
    caps = [e.capacity for e in g.edges]
    if objective == "max-flow":
        _, out = network.active_structure()
        active_edges = {e for edges in out.values() for e, _, _ in edges}
        costs = [1 if (e.head == network.sink and idx in active_edges) else 0 for idx, e in enumerate(g.edges)]
        return build_instance(g.num_edges, caps, costs, extra_rows)
    if objective == "min-cost":
        return build_instance(g.num_edges, caps, [e.cost for e in g.edges], extra_rows)
    raise ValueError("objective must be 'max-flow' or 'min-cost'")
