"""Graph data model and the extended DIMACS reader/writer.

File format (1-based node and edge ids)::

    p <kind> <nodes> <edges>
    n <id> s|t                      designated source / sink
    a <tail> <head> <cap> [<cost> [<fee>]]
    b <budget>
    alpha <edge> <value>
    c <j> <s> <t> <demand> <weight> commodity line (exactly five fields)
    c <anything else>               comment

Numbers may be integers, decimals or ``p/q`` rationals.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from ..errors import FormatError, IndexOutOfRange, InvalidInstance, NonPositiveCapacity
from ..instance import format_fraction, to_fraction

__all__ = [
    "Edge",
    "Digraph",
    "Graph",
    "Commodity",
    "ProblemFile",
    "parse_dimacs",
    "read_dimacs",
    "write_dimacs",
]


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    capacity: Fraction = Fraction(1)
    cost: Fraction = Fraction(0)
    fee: Fraction = Fraction(0)


class _EdgeList:
    directed = True

    def __init__(self, num_nodes: int, edges: Iterable = (), source: int | None = None, sink: int | None = None):
        if num_nodes < 1:
            raise InvalidInstance("a graph needs at least one node")
        self.num_nodes = num_nodes
        self.edges: list[Edge] = []
        self.source = source
        self.sink = sink
        for e in edges:
            if isinstance(e, Edge):
                self.add_edge(e.tail, e.head, e.capacity, e.cost, e.fee)
            else:
                self.add_edge(*e)
        for v in (source, sink):
            if v is not None and not 0 <= v < num_nodes:
                raise IndexOutOfRange(f"terminal {v} outside 0..{num_nodes - 1}")

    def add_edge(self, tail: int, head: int, capacity=1, cost=0, fee=0) -> int:
        if not (0 <= tail < self.num_nodes and 0 <= head < self.num_nodes):
            raise IndexOutOfRange(f"edge ({tail}, {head}) leaves the node range")
        capacity, cost, fee = to_fraction(capacity), to_fraction(cost), to_fraction(fee)
        if capacity <= 0:
            raise NonPositiveCapacity(f"edge ({tail}, {head}) has capacity {capacity}")
        if fee < 0:
            raise InvalidInstance(f"edge ({tail}, {head}) has negative fee {fee}")
        self.edges.append(Edge(tail, head, capacity, cost, fee))
        return len(self.edges) - 1

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.num_nodes}, m={self.num_edges})"


class Digraph(_EdgeList):
    """Directed multigraph with capacities, signed costs and budget fees."""

    def out_edges(self) -> list[list[int]]:
        out = [[] for _ in range(self.num_nodes)]
        for idx, e in enumerate(self.edges):
            out[e.tail].append(idx)
        return out


class Graph(_EdgeList):
    """Undirected multigraph; ``tail``/``head`` are just the two endpoints."""

    directed = False

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        adj = [[] for _ in range(self.num_nodes)]
        for e in self.edges:
            adj[e.tail].append(e.head)
            adj[e.head].append(e.tail)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.num_nodes


@dataclass(frozen=True)
class Commodity:
    source: int
    sink: int
    demand: Fraction = Fraction(1)
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        if self.source == self.sink:
            raise InvalidInstance("a commodity needs distinct terminals")
        if self.demand <= 0 or self.weight <= 0:
            raise InvalidInstance("commodity demand and weight must be positive")


@dataclass
class ProblemFile:
    kind: str
    graph: Digraph
    budget: Fraction | None = None
    commodities: list[Commodity] = field(default_factory=list)
    alpha: dict[int, Fraction] = field(default_factory=dict)

    def undirected(self) -> Graph:
        return Graph(self.graph.num_nodes, self.graph.edges)


def _num(token: str, lineno: int) -> Fraction:
    try:
        return to_fraction(token)
    except FormatError as exc:
        raise FormatError(f"line {lineno}: bad number {token!r}") from exc


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError as exc:
        raise FormatError(f"line {lineno}: expected an integer, got {token!r}") from exc


def _is_number(token: str) -> bool:
    try:
        to_fraction(token)
        return True
    except FormatError:
        return False


def parse_dimacs(text: str) -> ProblemFile:
    header = None
    edges = []
    source = sink = None
    budget = None
    commodities = []
    alpha = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts:
            continue
        tag = parts[0]
        if tag == "c":
            if len(parts) == 6 and all(_is_number(p) for p in parts[1:]):
                _, s, t, demand, weight = parts[1:]
                commodities.append((_int(s, lineno), _int(t, lineno), _num(demand, lineno), _num(weight, lineno), lineno))
            continue
        if tag == "p":
            if header is not None or len(parts) != 4:
                raise FormatError(f"line {lineno}: expected a single 'p <kind> <nodes> <edges>' line")
            header = (parts[1], _int(parts[2], lineno), _int(parts[3], lineno))
        elif tag == "a":
            if not 4 <= len(parts) <= 6:
                raise FormatError(f"line {lineno}: 'a' needs tail, head, capacity and optional cost, fee")
            nums = [_num(p, lineno) for p in parts[3:]] + [Fraction(0)] * (6 - len(parts))
            edges.append((_int(parts[1], lineno) - 1, _int(parts[2], lineno) - 1, *nums, lineno))
        elif tag == "n":
            if len(parts) != 3 or parts[2] not in ("s", "t"):
                raise FormatError(f"line {lineno}: expected 'n <id> s|t'")
            node = _int(parts[1], lineno) - 1
            if parts[2] == "s":
                source = node
            else:
                sink = node
        elif tag == "b":
            if len(parts) != 2:
                raise FormatError(f"line {lineno}: expected 'b <budget>'")
            budget = _num(parts[1], lineno)
            if budget <= 0:
                raise FormatError(f"line {lineno}: budget must be positive")
        elif tag == "alpha":
            if len(parts) != 3:
                raise FormatError(f"line {lineno}: expected 'alpha <edge> <value>'")
            alpha[_int(parts[1], lineno) - 1] = _num(parts[2], lineno)
        else:
            raise FormatError(f"line {lineno}: unknown line type {tag!r}")
    if header is None:
        raise FormatError("missing 'p' line")
    kind, n, m = header
    if len(edges) != m:
        raise FormatError(f"header announces {m} edges, found {len(edges)}")
    graph = Digraph(n)
    for tail, head, cap, cost, fee, lineno in edges:
        try:
            graph.add_edge(tail, head, cap, cost, fee)
        except InvalidInstance as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    for v in (source, sink):
        if v is not None and not 0 <= v < n:
            raise FormatError(f"terminal {v + 1} outside 1..{n}")
    graph.source, graph.sink = source, sink
    for e in alpha:
        if not 0 <= e < m:
            raise FormatError(f"alpha refers to missing edge {e + 1}")
    parsed = []
    for s, t, demand, weight, lineno in commodities:
        if not (1 <= s <= n and 1 <= t <= n):
            raise FormatError(f"line {lineno}: commodity terminal outside 1..{n}")
        try:
            parsed.append(Commodity(s - 1, t - 1, demand, weight))
        except InvalidInstance as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    return ProblemFile(kind, graph, budget, parsed, alpha)


def read_dimacs(path) -> ProblemFile:
    return parse_dimacs(Path(path).read_text())


def write_dimacs(problem: ProblemFile) -> str:
    g = problem.graph
    lines = [f"p {problem.kind} {g.num_nodes} {g.num_edges}"]
    if g.source is not None:
        lines.append(f"n {g.source + 1} s")
    if g.sink is not None:
        lines.append(f"n {g.sink + 1} t")
    if problem.budget is not None:
        lines.append(f"b {format_fraction(problem.budget)}")
    for j, com in enumerate(problem.commodities, 1):
        lines.append(f"c {j} {com.source + 1} {com.sink + 1} "
                     f"{format_fraction(com.demand)} {format_fraction(com.weight)}")
    for e in g.edges:
        lines.append(f"a {e.tail + 1} {e.head + 1} {format_fraction(e.capacity)} "
                     f"{format_fraction(e.cost)} {format_fraction(e.fee)}")
    for e, value in sorted(problem.alpha.items()):
        lines.append(f"alpha {e + 1} {format_fraction(value)}")
    return "\n".join(lines) + "\n"
