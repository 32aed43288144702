"""Seeded random instances for tests and the bench command."""
from __future__ import annotations

import random
from fractions import Fraction

from .apps.graphs import Digraph, Graph
from .instance import Generator, PackingInstance, new_instance
from .oracles import ExplicitSet

__all__ = [
    "random_fraction",
    "random_explicit",
    "random_digraph",
    "random_connected_graph",
    "random_flow_network",
]


def random_fraction(rng: random.Random, limit: int = 20, signed: bool = False, allow_zero: bool = False) -> Fraction:
    while True:
        v = Fraction(rng.randint(-limit if signed else 0, limit), rng.randint(1, limit))
        if v or allow_zero:
            return v


def random_explicit(rng: random.Random, *, max_rows: int = 8, max_cols: int = 8, max_gens: int = 12,
                    limit: int = 20, signed_costs: bool = True, min_rows: int = 2) -> tuple[PackingInstance, ExplicitSet]:
    """A packing instance with a random explicit generator set.

    Every generator loads at least one row, so the packing LP is bounded.
    """
    m = rng.randint(min_rows, max_rows)
    n = rng.randint(1, max_cols)
    triples = []
    for j in range(n):
        rows = rng.sample(range(m), rng.randint(1, m))
        triples += [(i, j, random_fraction(rng, limit)) for i in rows]
    for i in range(m):
        if not any(t[0] == i for t in triples):
            triples.append((i, rng.randrange(n), random_fraction(rng, limit)))
    b = [random_fraction(rng, limit) for _ in range(m)]
    c = [random_fraction(rng, limit, signed=signed_costs, allow_zero=True) for _ in range(n)]
    if not any(v > 0 for v in c):
        c[rng.randrange(n)] = random_fraction(rng, limit)
    k = rng.randint(1, max_gens)
    gens = set()
    while len(gens) < k:
        support = rng.sample(range(n), rng.randint(1, n))
        gens.add(Generator((j, random_fraction(rng, limit)) for j in support))
    ordered = sorted(gens, key=lambda g: (g.indices, g.values))
    return new_instance(m, n, triples, b, c), ExplicitSet(ordered)


def random_digraph(rng: random.Random, n: int, m: int, *, limit: int = 10, signed: bool = True,
                   parallel: bool = True) -> Digraph:
    g = Digraph(n)
    pairs = set()
    while g.num_edges < m:
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v or (not parallel and (u, v) in pairs):
            continue
        pairs.add((u, v))
        g.add_edge(u, v, random_fraction(rng, limit), random_fraction(rng, limit, signed=signed, allow_zero=True),
                   Fraction(rng.randint(0, limit)))
    return g


def random_connected_graph(rng: random.Random, n: int, extra: int, *, limit: int = 10) -> Graph:
    """A random spanning tree plus ``extra`` random (possibly parallel) edges."""
    g = Graph(n)
    for v in range(1, n):
        g.add_edge(rng.randrange(v), v, random_fraction(rng, limit), random_fraction(rng, limit, signed=True))
    for _ in range(extra):
        u, v = rng.sample(range(n), 2)
        g.add_edge(u, v, random_fraction(rng, limit), random_fraction(rng, limit, signed=True))
    return g


def random_flow_network(rng: random.Random, n: int, m: int, *, max_capacity: int = 100,
                        max_fee: int = 10) -> tuple[Digraph, Fraction]:
    """Simple digraph with source 0, sink ``n-1`` and a budget that binds.

    A Hamiltonian chain guarantees an ``s``-``t`` path.  The budget is a third of
    the fee mass of the source's out-edges at full capacity.
    """
    if not n - 1 <= m <= n * (n - 1):
        raise ValueError(f"a simple digraph on {n} nodes with a chain has {n - 1}..{n * (n - 1)} edges")
    g = Digraph(n, source=0, sink=n - 1)
    pairs = set()

    def add(u, v):
        pairs.add((u, v))
        g.add_edge(u, v, rng.randint(1, max_capacity), 0, rng.randint(0, max_fee))

    for v in range(n - 1):
        add(v, v + 1)
    while g.num_edges < m:
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v and (u, v) not in pairs:
            add(u, v)
    mass = sum((e.capacity * e.fee for e in g.edges if e.tail == 0), Fraction(0))
    return g, max(Fraction(1), mass / 3)
