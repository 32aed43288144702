import random
from fractions import Fraction as F

import pytest

from conepack import Generator
from conepack.apps import Digraph, ProcessingNetwork, SchemeOracle, scheme_oracle, solve_gpn
from conepack.apps.processing import gpn_instance
from conepack.errors import CyclicNetwork, InfeasibleNode, InvalidInstance
from conepack.verify import check_feasible, enumerate_schemes, exact_simplex, explicit_lp

EPS = F(1, 10)


def network(n, arcs, alpha=None):
    g = Digraph(n, source=0, sink=n - 1)
    for arc in arcs:
        g.add_edge(*arc)
    return ProcessingNetwork(g, alpha)


def test_greedy_fill():
    net = network(2, [(0, 1), (0, 1)], [F(3, 5), F(3, 5)])
    result = scheme_oracle(net, [1, 2])
    assert result.beta[0] == {0: F(3, 5), 1: F(2, 5)}
    assert result.cost == F(7, 5)
    assert result.generator == Generator({0: F(3, 5), 1: F(2, 5)})


def test_forced_distribution():
    net = network(3, [(0, 1), (1, 2)])
    result = scheme_oracle(net, [4, F(1, 2)])
    assert result.beta[1] == {1: 1}
    assert result.cost == F(9, 2)


def test_mass_below_one():
    with pytest.raises(InfeasibleNode):
        network(2, [(0, 1), (0, 1)], [F(3, 10), F(3, 10)]).active_structure()


def test_dead_ends_are_ignored():
    # node 2 has no route to t, so only edge 0 is active at s
    net = network(4, [(0, 3), (0, 2), (2, 1)], [1, F(1, 10), 1])
    assert scheme_oracle(net, [1, 0, 0]).generator == Generator({0: 1})


def test_cycle_rejected():
    with pytest.raises(CyclicNetwork):
        network(3, [(0, 1), (1, 0), (1, 2)]).active_structure()


def test_bad_alpha_and_unreachable_sink():
    with pytest.raises(InvalidInstance):
        network(2, [(0, 1)], [F(3, 2)])
    with pytest.raises(InvalidInstance):
        network(3, [(0, 1)]).active_structure()
    with pytest.raises(InvalidInstance):
        ProcessingNetwork(Digraph(2))


def gpn_opt(net, objective="max-flow"):
    instance = gpn_instance(net, objective)
    return instance, exact_simplex(explicit_lp(instance, enumerate_schemes(net))).value


def test_diamond():
    net = network(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    instance, opt = gpn_opt(net)
    assert opt == 2
    sol = solve_gpn(net, EPS).solution
    assert F(sol.objective) >= 2 * (1 - EPS)
    assert check_feasible(instance, sol.x)[0]


def test_forced_split():
    net = network(3, [(0, 1, 2), (1, 2), (1, 2)], [1, F(1, 2), F(1, 2)])
    _, opt = gpn_opt(net)
    assert opt == 2
    assert F(solve_gpn(net, EPS).solution.objective) >= 2 * (1 - EPS)


def test_single_path_bottleneck():
    net = network(4, [(0, 1, 3), (1, 2, 2), (2, 3, 5)])
    _, opt = gpn_opt(net)
    assert opt == 2
    assert 2 * (1 - EPS) <= F(solve_gpn(net, EPS).solution.objective) <= 2


@pytest.mark.parametrize("bound", ["weak", "parametric"])
def test_signed_objective(bound):
    net = network(4, [(0, 1, 1, 3), (0, 2, 2, -1), (1, 3, 1, 1), (2, 3, 1, 0)], [F(1, 2), 1, 1, 1])
    instance, opt = gpn_opt(net, "min-cost")
    sol = solve_gpn(net, EPS, "min-cost", bound=bound).solution
    assert F(sol.objective) >= (1 - EPS) * opt
    assert check_feasible(instance, sol.x)[0]


def test_unknown_objective():
    with pytest.raises(ValueError):
        gpn_instance(network(2, [(0, 1)]), "cheapest")


@pytest.mark.parametrize("seed", range(10))
def test_random_networks(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 6)
    arcs, alpha = [], []
    for v in range(n - 1):
        heads = sorted({v + 1} | {rng.randint(v + 1, n - 1) for _ in range(rng.randint(0, 2))})
        ratios = [F(rng.randint(3, 10), 10) for _ in heads]
        if sum(ratios) < 1:
            ratios[0] = F(1)
        arcs += [(v, h, rng.randint(1, 4)) for h in heads]
        alpha += ratios
    net = network(n, arcs, alpha)
    instance, opt = gpn_opt(net)
    sol = solve_gpn(net, F(1, 5)).solution
    assert F(sol.objective) >= F(4, 5) * opt
    assert check_feasible(instance, sol.x)[0]
    assert SchemeOracle(net).level.name == "MINIMIZING"
