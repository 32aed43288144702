"""Matroids given by independence tests, and fractional base packing."""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Callable, Sequence

from ..errors import InvalidInstance, RankDeficient
from ..instance import Generator, to_fraction
from ..oracles import Certificate, Level, Oracle
from ..solve import SolveResult, solve
from .common import ExtraRow, build_instance
from .graphs import Graph
from .trees import DisjointSets

__all__ = [
    "Matroid",
    "IndependenceMatroid",
    "UniformMatroid",
    "FreeMatroid",
    "PartitionMatroid",
    "GraphicMatroid",
    "matroid_greedy",
    "matroid_greedy_oracle",
    "BasisOracle",
    "solve_basepack",
    "basepack_instance",
]


class Matroid:
    """Ground set ``0..ground_size-1``, declared ``rank`` and an independence test."""

    ground_size: int
    rank: int

    def is_independent(self, subset: frozenset) -> bool:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(size={self.ground_size}, rank={self.rank})"


class IndependenceMatroid(Matroid):
    """Wraps a user-supplied test ``frozenset -> bool``."""

    def __init__(self, ground_size: int, rank: int, test: Callable[[frozenset], bool]):
        self.ground_size = ground_size
        self.rank = rank
        self._test = test

    def is_independent(self, subset: frozenset) -> bool:
        return self._test(subset)


class UniformMatroid(Matroid):
    def __init__(self, rank: int, ground_size: int):
        if not 0 <= rank <= ground_size:
            raise InvalidInstance("uniform matroid needs 0 <= rank <= size")
        self.rank = rank
        self.ground_size = ground_size

    def is_independent(self, subset: frozenset) -> bool:
        return len(subset) <= self.rank


class FreeMatroid(UniformMatroid):
    def __init__(self, ground_size: int):
        super().__init__(ground_size, ground_size)


class PartitionMatroid(Matroid):
    """Element ``i`` lies in block ``blocks[i]``; block ``k`` admits ``limits[k]`` elements."""

    def __init__(self, blocks: Sequence[int], limits: Sequence[int]):
        self.blocks = list(blocks)
        self.limits = list(limits)
        if any(not 0 <= b < len(self.limits) for b in self.blocks):
            raise InvalidInstance("block index out of range")
        if any(k < 0 for k in self.limits):
            raise InvalidInstance("block limits must be non-negative")
        sizes = Counter(self.blocks)
        self.ground_size = len(self.blocks)
        self.rank = sum(min(k, sizes[b]) for b, k in enumerate(self.limits))

    def is_independent(self, subset: frozenset) -> bool:
        used = Counter(self.blocks[i] for i in subset)
        return all(used[b] <= self.limits[b] for b in used)


class GraphicMatroid(Matroid):
    """Edge sets without cycles in an undirected multigraph."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self.ground_size = graph.num_edges
        sets = DisjointSets(graph.num_nodes)
        components = graph.num_nodes
        for e in graph.edges:
            if sets.union(e.tail, e.head):
                components -= 1
        self.rank = graph.num_nodes - components

    def is_independent(self, subset: frozenset) -> bool:
        sets = DisjointSets(self.graph.num_nodes)
        for i in subset:
            e = self.graph.edges[i]
            if not sets.union(e.tail, e.head):
                return False
        return True


def matroid_greedy(matroid: Matroid, d: Sequence) -> list[int]:
    """A minimum-cost basis; ties go to the smaller element."""
    order = sorted(range(matroid.ground_size), key=lambda i: (d[i], i))
    chosen: list[int] = []
    current = frozenset()
    for i in order:
        if len(chosen) == matroid.rank:
            break
        candidate = current | {i}
        if matroid.is_independent(candidate):
            chosen.append(i)
            current = candidate
    if len(chosen) < matroid.rank:
        raise RankDeficient(f"greedy found {len(chosen)} independent elements, rank is {matroid.rank}")
    return sorted(chosen)


def matroid_greedy_oracle(matroid: Matroid, d: Sequence) -> Generator:
    return Generator((i, 1) for i in matroid_greedy(matroid, d))


class BasisOracle(Oracle):
    level = Level.MINIMIZING

    def __init__(self, matroid: Matroid):
        if matroid.ground_size == 0 or matroid.rank == 0:
            raise InvalidInstance("base packing needs a matroid of positive rank")
        self.matroid = matroid

    def query(self, d):
        g = matroid_greedy_oracle(self.matroid, d)
        return Certificate(g, g.dot(d))


def solve_basepack(matroid: Matroid, epsilon, capacities: Sequence | None = None, weights: Sequence | None = None,
                   *, bound: str = "weak", extra_rows: Sequence[ExtraRow] = (),
                   record_steps: bool = False) -> SolveResult:
    """Pack bases fractionally within element capacities (default one each).

    The objective is ``sum x_i / r`` unweighted and ``sum w_i x_i / r`` weighted.
    """
    oracle = BasisOracle(matroid)
    instance = basepack_instance(matroid, capacities, weights, extra_rows)
    if weights is None:
        return solve(instance, oracle, epsilon, uniform_cost=1, record_steps=record_steps)
    return solve(instance, oracle, epsilon, bound=bound, record_steps=record_steps)


def basepack_instance(matroid: Matroid, capacities: Sequence | None = None, weights: Sequence | None = None,
                      extra_rows: Sequence[ExtraRow] = ()):
    size = matroid.ground_size
    caps = [Fraction(1)] * size if capacities is None else [to_fraction(u) for u in capacities]
    scale = Fraction(1, matroid.rank)
    if weights is None:
        return build_instance(size, caps, [scale] * size, extra_rows)
    return build_instance(size, caps, [to_fraction(w) * scale for w in weights], extra_rows)
