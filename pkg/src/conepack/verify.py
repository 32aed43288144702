"""Exact ground truth: rational simplex, brute-force enumerators, feasibility checks.

Nothing here shares code with the approximation path; these routines are the
independent reference that the solvers are tested against.  Everything is
computed with :class:`fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import NoPositiveCost, TooLarge, Unbounded
from .instance import Generator, PackingInstance, to_fraction

__all__ = [
    "check_feasible",
    "ExplicitLP",
    "explicit_lp",
    "SimplexResult",
    "exact_simplex",
    "brute_force_ratio",
    "enumerate_cycles",
    "enumerate_paths",
    "enumerate_trees",
    "enumerate_bases",
    "enumerate_schemes",
    "MAX_CYCLE_NODES",
    "MAX_TREE_NODES",
    "MAX_BASE_ELEMENTS",
    "MAX_SCHEME_DEGREE",
]

MAX_CYCLE_NODES = 7
MAX_TREE_NODES = 6
MAX_BASE_ELEMENTS = 12
MAX_SCHEME_DEGREE = 3
MAX_SCHEME_NODES = 10


def check_feasible(instance: PackingInstance, x) -> tuple[bool, Fraction]:
    """Exact check of ``A x <= b``; also returns ``max_i (A_i x - b_i) / b_i``.

    Float entries of ``x`` are converted to the rationals they represent.
    """
    xs = [to_fraction(v) for v in (x.tolist() if hasattr(x, "tolist") else x)]
    if len(xs) != instance.num_cols:
        raise ValueError(f"expected {instance.num_cols} entries, got {len(xs)}")
    worst = None
    for i, row in enumerate(instance.rows_exact):
        load = Fraction(0)
        for j, v in row:
            if xs[j]:
                load += v * xs[j]
        rel = (load - instance.capacities[i]) / instance.capacities[i]
        if worst is None or rel > worst:
            worst = rel
    nonneg = all(v >= 0 for v in xs)
    return (worst <= 0 and nonneg), worst


@dataclass(frozen=True)
class ExplicitLP:
    """``max sum_l alpha_l obj_l  s.t.  sum_l alpha_l col_l <= rhs, alpha >= 0``."""

    objective: tuple[Fraction, ...]
    columns: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.objective) != len(self.columns):
            raise ValueError("one objective coefficient per column is required")
        for col in self.columns:
            if len(col) != len(self.rhs):
                raise ValueError("column length differs from the number of rows")
            if any(v < 0 for v in col):
                raise ValueError("packing columns must be non-negative")

    @classmethod
    def create(cls, objective, columns, rhs) -> "ExplicitLP":
        return cls(
            tuple(to_fraction(v) for v in objective),
            tuple(tuple(to_fraction(v) for v in col) for col in columns),
            tuple(to_fraction(v) for v in rhs),
        )


def explicit_lp(instance: PackingInstance, generators: Sequence[Generator]) -> ExplicitLP:
    """Materialize the packing LP over the weights of an enumerated generator list."""
    objective = []
    columns = []
    for g in generators:
        dense = g.to_dense(instance.num_cols)
        objective.append(sum((instance.costs[j] * dense[j] for j in range(instance.num_cols)), Fraction(0)))
        columns.append(tuple(sum((v * dense[j] for j, v in row), Fraction(0)) for row in instance.rows_exact))
    return ExplicitLP(tuple(objective), tuple(columns), tuple(instance.capacities))


@dataclass
class SimplexResult:
    value: Fraction
    alpha: list[Fraction]
    duals: list[Fraction]

    def __iter__(self):
        return iter((self.value, self.alpha))


def exact_simplex(lp: ExplicitLP) -> SimplexResult:
    """Solve a packing LP with a rational tableau and Bland's pivoting rule."""
    k = len(lp.objective)
    m = len(lp.rhs)
    if any(b < 0 for b in lp.rhs):
        raise ValueError("packing right-hand sides must be non-negative")
    if k == 0:
        return SimplexResult(Fraction(0), [], [Fraction(0)] * m)
    width = k + m
    rows = []
    for i in range(m):
        row = [lp.columns[l][i] for l in range(k)] + [Fraction(0)] * m
        row[k + i] = Fraction(1)
        rows.append(row)
    rhs = list(lp.rhs)
    reduced = list(lp.objective) + [Fraction(0)] * m
    basis = [k + i for i in range(m)]

    while True:
        enter = next((j for j in range(width) if reduced[j] > 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            coef = rows[i][enter]
            if coef > 0:
                key = (rhs[i] / coef, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise Unbounded(f"column {enter} can grow without bound")
        r = best[1]
        pivot = rows[r][enter]
        prow = [v / pivot for v in rows[r]]
        rows[r] = prow
        rhs[r] = rhs[r] / pivot
        for i in range(m):
            if i != r and rows[i][enter]:
                f = rows[i][enter]
                rows[i] = [v - f * p for v, p in zip(rows[i], prow)]
                rhs[i] -= f * rhs[r]
        f = reduced[enter]
        reduced = [v - f * p for v, p in zip(reduced, prow)]
        basis[r] = enter

    alpha = [Fraction(0)] * k
    for i, var in enumerate(basis):
        if var < k:
            alpha[var] = rhs[i]
    value = sum((a * c for a, c in zip(alpha, lp.objective)), Fraction(0))
    duals = [-reduced[k + i] for i in range(m)]
    return SimplexResult(value, alpha, duals)


def brute_force_ratio(generators: Sequence[Generator], a, c) -> tuple[Fraction, Generator]:
    """Exact minimum of ``a^T x / c^T x`` over generators with ``c^T x > 0``."""
    a = [to_fraction(v) for v in a]
    c = [to_fraction(v) for v in c]
    best = None
    for g in generators:
        den = g.dot(c)
        if den > 0:
            ratio = g.dot(a) / den
            if best is None or ratio < best[0]:
                best = (ratio, g)
    if best is None:
        raise NoPositiveCost("no generator has positive objective")
    return best


def _unit_generator(edge_ids) -> Generator:
    return Generator((e, 1) for e in edge_ids)


def enumerate_cycles(graph) -> list[Generator]:
    """All simple directed cycles as unit edge flows (parallel edges give distinct cycles)."""
    n = graph.num_nodes
    if n > MAX_CYCLE_NODES:
        raise TooLarge(f"cycle enumeration is capped at {MAX_CYCLE_NODES} nodes")
    out = [[] for _ in range(n)]
    for idx, e in enumerate(graph.edges):
        out[e.tail].append((idx, e.head))
    found = []

    def extend(start, node, visited, path):
        for idx, head in out[node]:
            if head == start:
                found.append(_unit_generator(path + [idx]))
            elif head > start and head not in visited:
                visited.add(head)
                extend(start, head, visited, path + [idx])
                visited.discard(head)

    for start in range(n):
        extend(start, start, {start}, [])
    return found


def enumerate_paths(graph, source: int, sink: int) -> list[Generator]:
    """All simple ``source``-``sink`` paths as unit edge flows."""
    n = graph.num_nodes
    if n > MAX_CYCLE_NODES:
        raise TooLarge(f"path enumeration is capped at {MAX_CYCLE_NODES} nodes")
    out = [[] for _ in range(n)]
    for idx, e in enumerate(graph.edges):
        out[e.tail].append((idx, e.head))
    found = []

    def extend(node, visited, path):
        if node == sink:
            found.append(_unit_generator(path))
            return
        for idx, head in out[node]:
            if head not in visited:
                visited.add(head)
                extend(head, visited, path + [idx])
                visited.discard(head)

    extend(source, {source}, [])
    return found


def _find(parent, v):
    while parent[v] != v:
        parent[v] = parent[parent[v]]
        v = parent[v]
    return v


def enumerate_trees(graph) -> list[Generator]:
    """All spanning trees of an undirected (multi)graph as edge incidence vectors."""
    n = graph.num_nodes
    if n > MAX_TREE_NODES:
        raise TooLarge(f"tree enumeration is capped at {MAX_TREE_NODES} nodes")
    edges = [(e.tail, e.head) for e in graph.edges]
    trees = []
    for subset in combinations(range(len(edges)), n - 1):
        parent = list(range(n))
        ok = True
        for idx in subset:
            u, v = edges[idx]
            ru, rv = _find(parent, u), _find(parent, v)
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        if ok:
            trees.append(_unit_generator(subset))
    return trees


def enumerate_bases(matroid) -> list[Generator]:
    """All bases of a matroid given by an independence test."""
    size = matroid.ground_size
    if size > MAX_BASE_ELEMENTS:
        raise TooLarge(f"basis enumeration is capped at {MAX_BASE_ELEMENTS} elements")
    return [
        _unit_generator(subset)
        for subset in combinations(range(size), matroid.rank)
        if matroid.is_independent(frozenset(subset))
    ]


def _basic_distributions(out_edges):
    """Every basic split of one unit over ``[(edge, alpha), ...]``."""
    found = {}
    ids = [e for e, _ in out_edges]
    alpha = dict(out_edges)
    for size in range(len(ids) + 1):
        for saturated in combinations(ids, size):
            rest = 1 - sum((alpha[e] for e in saturated), Fraction(0))
            if rest < 0:
                continue
            split = {e: alpha[e] for e in saturated}
            if rest == 0:
                found[tuple(sorted(split.items()))] = split
                continue
            for f in ids:
                if f not in split and rest < alpha[f]:
                    frac = dict(split)
                    frac[f] = rest
                    found[tuple(sorted(frac.items()))] = frac
    return list(found.values())


def enumerate_schemes(network) -> list[Generator]:
    """Unit flows of every basic flow distribution scheme, deduplicated.

    Only nodes that actually receive flow branch, so the enumeration is over
    distinct generators rather than over full scheme tuples.
    """
    order, out_edges = network.active_structure()
    if len(order) > MAX_SCHEME_NODES:
        raise TooLarge(f"scheme enumeration is capped at {MAX_SCHEME_NODES} nodes")
    if any(len(edges) > MAX_SCHEME_DEGREE for edges in out_edges.values()):
        raise TooLarge(f"scheme enumeration is capped at out-degree {MAX_SCHEME_DEGREE}")
    splits = {v: _basic_distributions([(e, a) for e, _, a in edges]) for v, edges in out_edges.items()}
    heads = {e: h for edges in out_edges.values() for e, h, _ in edges}
    sink = network.sink
    results = set()

    def walk(pos, inflow, flow):
        while pos < len(order) and (order[pos] == sink or not inflow.get(order[pos])):
            pos += 1
        if pos == len(order):
            results.add(Generator(flow))
            return
        v = order[pos]
        amount = inflow[v]
        for split in splits[v]:
            nxt = dict(inflow)
            nxt[v] = Fraction(0)
            new_flow = dict(flow)
            for e, beta in split.items():
                if beta:
                    new_flow[e] = new_flow.get(e, Fraction(0)) + amount * beta
                    nxt[heads[e]] = nxt.get(heads[e], Fraction(0)) + amount * beta
            walk(pos + 1, nxt, new_flow)

    walk(0, {network.source: Fraction(1)}, {})
    return sorted(results, key=lambda g: (g.indices, g.values))
