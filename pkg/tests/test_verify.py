import random
from fractions import Fraction as F
from itertools import combinations

import numpy as np
import pytest
from scipy.optimize import linprog

from conepack import Generator, new_instance
from conepack.apps import Digraph, Graph, GraphicMatroid, PartitionMatroid, ProcessingNetwork, UniformMatroid
from conepack.errors import NoPositiveCost, TooLarge, Unbounded
from conepack.verify import (
    ExplicitLP,
    brute_force_ratio,
    check_feasible,
    enumerate_bases,
    enumerate_cycles,
    enumerate_paths,
    enumerate_schemes,
    enumerate_trees,
    exact_simplex,
    explicit_lp,
)


def complete_graph(n):
    g = Graph(n)
    for u, v in combinations(range(n), 2):
        g.add_edge(u, v)
    return g


def test_simplex_t1(t1):
    lp = explicit_lp(t1, [Generator.from_dense([1, 0]), Generator.from_dense([0, 1])])
    value, alpha = exact_simplex(lp)
    assert value == 2
    assert alpha == [1, 1]


def test_simplex_empty():
    assert exact_simplex(ExplicitLP.create([], [], [1, 1])).value == 0


def test_simplex_unbounded():
    with pytest.raises(Unbounded):
        exact_simplex(ExplicitLP.create([1], [[0, 0]], [1, 1]))


def test_explicit_lp_validation():
    with pytest.raises(ValueError):
        ExplicitLP.create([1], [[1, -1]], [1, 1])
    with pytest.raises(ValueError):
        ExplicitLP.create([1, 2], [[1, 1]], [1, 1])


@pytest.mark.parametrize("seed", range(30))
def test_simplex_self_check(seed):
    rng = random.Random(seed)
    m, k = rng.randint(1, 5), rng.randint(1, 6)
    cols = [[F(rng.randint(0, 5), rng.randint(1, 3)) for _ in range(m)] for _ in range(k)]
    cols = [c if any(c) else [F(1)] * m for c in cols]
    obj = [F(rng.randint(-4, 9), rng.randint(1, 3)) for _ in range(k)]
    rhs = [F(rng.randint(1, 9), rng.randint(1, 3)) for _ in range(m)]
    result = exact_simplex(ExplicitLP.create(obj, cols, rhs))

    assert all(a >= 0 for a in result.alpha)
    for i in range(m):
        assert sum(a * c[i] for a, c in zip(result.alpha, cols)) <= rhs[i]
    assert result.value == sum(a * o for a, o in zip(result.alpha, obj))

    # weak duality against random dual-feasible vectors
    for _ in range(5):
        y = [F(rng.randint(0, 5)) for _ in range(m)]
        while any(sum(y[i] * c[i] for i in range(m)) < o for c, o in zip(cols, obj)):
            y = [v * 2 + 1 for v in y]
        assert sum(yi * bi for yi, bi in zip(y, rhs)) >= result.value

    ref = linprog(-np.array(obj, dtype=float), A_ub=np.array(cols, dtype=float).T,
                  b_ub=np.array(rhs, dtype=float), bounds=(0, None), method="highs")
    assert float(result.value) == pytest.approx(-ref.fun, rel=1e-9, abs=1e-9)


def test_brute_force_ratio_examples():
    s = [Generator.from_dense([1, 0]), Generator.from_dense([0, 1]), Generator.from_dense([1, 1])]
    assert brute_force_ratio(s, [1, 2], [1, 1]) == (1, s[0])
    g = Generator.from_dense([2, 3])
    assert brute_force_ratio([g], [4, 5], [4, 5])[0] == 1
    with pytest.raises(NoPositiveCost):
        brute_force_ratio(s, [1, 1], [-1, 0])


def test_check_feasible_examples(t1):
    assert check_feasible(t1, [0, 0]) == (True, -1)
    assert check_feasible(t1, [1, 1]) == (True, 0)
    ok, worst = check_feasible(t1, [F(11, 10), 0])
    assert not ok and worst == F(1, 10)
    assert check_feasible(t1, np.array([0.5, 0.25]))[0]
    assert not check_feasible(t1, [-1, 0])[0]
    with pytest.raises(ValueError):
        check_feasible(t1, [0])


def test_check_feasible_is_exact():
    inst = new_instance(1, 1, [(0, 0, 3)], [1], [1])
    third = 1 / 3
    ok, _ = check_feasible(inst, [third])
    assert ok == (F(third) * 3 <= 1)


def test_cycle_counts():
    tri = Digraph(3)
    for u, v in ((0, 1), (1, 2), (2, 0)):
        tri.add_edge(u, v)
    assert enumerate_cycles(tri) == [Generator({0: 1, 1: 1, 2: 1})]
    both = Digraph(3)
    for u, v in combinations(range(3), 2):
        both.add_edge(u, v)
        both.add_edge(v, u)
    # three 2-cycles and two directed triangles
    assert len(enumerate_cycles(both)) == 5
    with pytest.raises(TooLarge):
        enumerate_cycles(Digraph(8))


def test_paths():
    g = Digraph(4)
    for u, v in ((0, 1), (1, 3), (0, 2), (2, 3), (1, 2)):
        g.add_edge(u, v)
    assert len(enumerate_paths(g, 0, 3)) == 3


@pytest.mark.parametrize("n, count", [(2, 1), (3, 3), (4, 16), (5, 125), (6, 1296)])
def test_tree_counts_cayley(n, count):
    assert len(enumerate_trees(complete_graph(n))) == count


def test_tree_limit():
    with pytest.raises(TooLarge):
        enumerate_trees(complete_graph(7))


@pytest.mark.parametrize("r, s", [(2, 3), (1, 4), (3, 6), (5, 5)])
def test_uniform_basis_counts(r, s):
    from math import comb
    assert len(enumerate_bases(UniformMatroid(r, s))) == comb(s, r)


def test_other_bases():
    assert len(enumerate_bases(PartitionMatroid([0, 0, 1], [1, 1]))) == 2
    assert len(enumerate_bases(GraphicMatroid(complete_graph(4)))) == 16
    with pytest.raises(TooLarge):
        enumerate_bases(UniformMatroid(2, 13))


def test_schemes_diamond():
    g = Digraph(4, source=0, sink=3)
    for u, v in ((0, 1), (0, 2), (1, 3), (2, 3)):
        g.add_edge(u, v)
    net = ProcessingNetwork(g, {0: F(1, 2), 1: F(1, 2), 2: 1, 3: 1})
    schemes = enumerate_schemes(net)
    assert schemes == [Generator({0: F(1, 2), 1: F(1, 2), 2: F(1, 2), 3: F(1, 2)})]
    full = ProcessingNetwork(g)
    assert len(enumerate_schemes(full)) == 2
