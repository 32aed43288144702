"""Acceptance criteria 1-9, one test each.

Every test prints (and the terminal summary repeats) a single pass/fail line.
Expected values come from the exact references in ``conepack.verify`` or
from formulas evaluated here, never from the solver under test.
"""
import math
import random
import time
from fractions import Fraction

import pytest

from conepack import ExplicitSet, Generator, Level, solve
from conepack.apps import (
    Digraph,
    Graph,
    GraphicMatroid,
    PartitionMatroid,
    ProcessingNetwork,
    FreeMatroid,
    UniformMatroid,
    karp_min_mean_cycle,
    kruskal,
    matroid_greedy,
    scheme_oracle,
    solve_basepack,
    solve_budget_maxflow,
    solve_treepack,
    treepack_instance,
)
from conepack.bounds import find_initial_bound
from conepack.errors import NoCycle
from conepack.generators import random_connected_graph, random_digraph, random_explicit, random_flow_network
from conepack.instance import ApproxParams
from conepack.oracles import ALL_NON_NEGATIVE, Certificate, minimizing_as_sign, sign_as_separation
from conepack.parametric import most_violated
from conepack.verify import (
    brute_force_ratio,
    check_feasible,
    enumerate_bases,
    enumerate_cycles,
    enumerate_schemes,
    enumerate_trees,
    exact_simplex,
    explicit_lp,
)

F = Fraction
EPSILONS = (F(1, 2), F(1, 5), F(1, 10), F(1, 20))
SEEDS = range(200)
UNIFORM_SEEDS = range(1000, 1050)
TIME_LIMIT = 1.0


def _delta(eps, m):
    ep = float(eps) / 2
    return (1 + ep) / ((1 + ep) * m) ** (1 / ep)


def _augment_limit(eps, m):
    ep = float(eps) / 2
    return (1 / ep) * m * (1 + math.log(m) / math.log1p(ep)) + m


def _raise_limit(eps, m):
    e = float(eps)
    log_arg = math.log1p(e) + (m / e) * math.log(m) - math.log(_delta(eps, m))
    return log_arg / math.log1p(e) + 1


def _uniform_version(instance, oracle):
    """Same instance with every positive-cost generator scaled to cost one."""
    gens = []
    for g in oracle.generators:
        cost = g.dot(instance.costs)
        if cost > 0:
            gens.append(g.scaled(1 / cost))
    return ExplicitSet(gens) if gens else None


def _build_cases():
    cases = []
    for seed in SEEDS:
        instance, oracle = random_explicit(random.Random(seed))
        cases.append(("general", seed, instance, oracle))
    for seed in UNIFORM_SEEDS:
        instance, oracle = random_explicit(random.Random(seed))
        uniform = _uniform_version(instance, oracle)
        if uniform is not None:
            cases.append(("uniform", seed, instance, uniform))
    return cases


@pytest.fixture(scope="module")
def runs():
    """Solve every random case at every epsilon once; criteria 1-3 share the results."""
    out = []
    for kind, seed, instance, oracle in _build_cases():
        opt = exact_simplex(explicit_lp(instance, oracle.generators)).value
        for eps in EPSILONS:
            start = time.perf_counter()
            result = solve(instance, oracle, eps)
            elapsed = time.perf_counter() - start
            out.append((kind, seed, eps, instance, opt, result, elapsed))
    return out


def test_criterion_1_approximation(runs, report):
    failures = [
        (kind, seed, eps, r.solution.objective, opt)
        for kind, seed, eps, _, opt, r, _ in runs
        if F(r.solution.objective) < (1 - eps) * opt
    ]
    slow = [(kind, seed, eps, t) for kind, seed, eps, _, _, _, t in runs if t >= TIME_LIMIT]
    uniform = sum(1 for kind, *_ in runs if kind == "uniform")
    modes_ok = all(r.mode == "uniform" for kind, *_, r, _ in runs if kind == "uniform")
    general = sum(1 for kind, *_ in runs if kind == "general")
    worst = max(t for *_, t in runs)
    ok = not failures and not slow and modes_ok and general >= 200 * len(EPSILONS)
    report(1, ok, f"{len(runs)} runs ({uniform} uniform), {len(failures)} below (1-eps)OPT, "
                  f"{len(slow)} over {TIME_LIMIT}s, slowest {worst:.3f}s")
    assert not failures, failures[:5]
    assert not slow, slow[:5]
    assert modes_ok
    assert general >= 200 * len(EPSILONS)


def test_criterion_2_exact_feasibility(runs, report):
    bad = []
    for kind, seed, eps, instance, _, r, _ in runs:
        feasible, worst = check_feasible(instance, r.solution.x)
        if not feasible or worst > 0 or not r.solution.feasible:
            bad.append((kind, seed, eps, worst))
    report(2, not bad, f"{len(runs)} solutions checked in rationals, {len(bad)} infeasible")
    assert not bad, bad[:5]


def test_criterion_3_iteration_bounds(runs, report):
    bad = []
    for kind, seed, eps, instance, _, r, _ in runs:
        m = instance.num_rows
        s = r.solution
        if s.augment_steps > _augment_limit(eps, m) or s.bound_raises > _raise_limit(eps, m):
            bad.append((kind, seed, eps, s.augment_steps, s.bound_raises))
    report(3, not bad, f"{len(runs)} runs, {len(bad)} over the augment or raise bound")
    assert not bad, bad[:5]


def _random_ratio_case(rng):
    n = rng.randint(1, 5)
    while True:
        gens = set()
        for _ in range(rng.randint(1, 6)):
            support = rng.sample(range(n), rng.randint(1, n))
            gens.add(Generator((j, F(rng.randint(1, 6), rng.randint(1, 4))) for j in support))
        gens = sorted(gens, key=lambda g: (g.indices, g.values))
        a = [F(rng.randint(1, 12), rng.randint(1, 4)) for _ in range(n)]
        c = [F(rng.randint(-6, 8), rng.randint(1, 3)) for _ in range(n)]
        if any(g.dot(c) > 0 for g in gens):
            return gens, a, c


def test_criterion_4_parametric_exactness(report):
    total = 0
    equal = 0
    mismatches = []
    for seed in range(500):
        gens, a, c = _random_ratio_case(random.Random(seed))
        expected, _ = brute_force_ratio(gens, a, c)
        for level in (Level.SIGN, Level.SEPARATION):
            total += 1
            got = most_violated(a, c, ExplicitSet(gens, level))
            if got.lam == expected and got.generator.dot(a) == expected * got.generator.dot(c):
                equal += 1
            else:
                mismatches.append((seed, level.name, got.lam, expected))
    report(4, equal == total, f"{equal}/{total} exact matches (500 instances, sign and separation)")
    assert not mismatches, mismatches[:5]


def _initial_reduced_costs(instance, delta):
    a = [F(0)] * instance.num_cols
    for i, j, v in instance.triples:
        a[j] += delta / instance.capacities[i] * v
    return a


def test_criterion_5_bound_bracket(report):
    checked = 0
    bad = []
    for seed in SEEDS:
        instance, oracle = random_explicit(random.Random(seed))
        if not any(g.dot(instance.costs) > 0 for g in oracle.generators):
            continue
        for eps in EPSILONS:
            m = instance.num_rows
            params = ApproxParams.create(eps, m)
            a = _initial_reduced_costs(instance, F(params.delta))
            lam_star, _ = brute_force_ratio(oracle.generators, a, instance.costs)
            found = find_initial_bound(instance, params, oracle)
            lower = found.lower
            ceiling = F(m) ** (m * int(1 / eps))  # m^(m/eps), exact for eps = 1/k
            br = found.bracket
            log_span = math.log(br.lambda_hi / br.lambda_lo) / math.log(br.ratio.numerator)
            budget = min(math.ceil(math.log2(max(1.0, log_span))) + 3,
                         math.ceil(math.log2(br.exponent_range)) + 2)
            checked += 1
            if not (0 < lower <= lam_star <= ceiling * lower) or found.probes > budget:
                bad.append((seed, eps, float(lower), float(lam_star), found.probes, budget))
    report(5, not bad, f"{checked} brackets, {len(bad)} outside [lam, m^(m/eps) lam] or over the probe budget")
    assert checked >= 600
    assert not bad, bad[:5]


def _cycle_mean(g, d):
    return g.dot(d) / len(g.indices)


def _random_scheme_network(rng):
    n = rng.randint(3, 7)
    g = Digraph(n, source=0, sink=n - 1)
    alpha = {}
    for v in range(n - 1):
        heads = {v + 1} | set(rng.sample(range(v + 1, n), min(rng.randint(0, 2), n - v - 1)))
        heads = sorted(heads)[:3]
        ids = [g.add_edge(v, h, 1) for h in heads]
        ratios = [F(rng.randint(1, 10), 10) for _ in ids]
        if sum(ratios) < 1:
            ratios[rng.randrange(len(ratios))] = F(1)
        alpha.update(zip(ids, ratios))
    return ProcessingNetwork(g, alpha)


def test_criterion_6_oracle_ground_truth(report):
    rng = random.Random(6)
    karp_bad = []
    for t in range(300):
        n = rng.randint(2, 7)
        g = random_digraph(rng, n, rng.randint(1, min(12, n * (n - 1))), parallel=False)
        d = [e.cost for e in g.edges]
        cycles = enumerate_cycles(g)
        if not cycles:
            try:
                karp_min_mean_cycle(g, d)
                karp_bad.append((t, "cycle on acyclic graph"))
            except NoCycle:
                pass
            continue
        edges, mean = karp_min_mean_cycle(g, d)
        best = min(_cycle_mean(c, d) for c in cycles)
        found = Generator((e, 1) for e in edges)
        if mean != best or _cycle_mean(found, d) != best or found not in cycles:
            karp_bad.append((t, mean, best))

    mst_bad = []
    for t in range(300):
        n = rng.randint(2, 6)
        g = random_connected_graph(rng, n, rng.randint(0, 6))
        d = [e.cost for e in g.edges]
        tree = Generator((e, 1) for e in kruskal(g, d))
        best = min(tr.dot(d) for tr in enumerate_trees(g))
        if tree.dot(d) != best:
            mst_bad.append((t, tree.dot(d), best))

    matroid_bad = []
    matroids = [UniformMatroid(r, s) for s in range(1, 11) for r in range(1, s + 1)]
    matroids += [FreeMatroid(s) for s in range(1, 11)]
    for _ in range(30):
        size = rng.randint(1, 10)
        blocks = [rng.randrange(3) for _ in range(size)]
        matroids.append(PartitionMatroid(blocks, [rng.randint(0, 3) for _ in range(3)]))
    for _ in range(30):
        g = random_connected_graph(rng, rng.randint(2, 6), rng.randint(0, 4))
        matroids.append(GraphicMatroid(g))
    matroid_checks = 0
    for mat in matroids:
        if mat.rank == 0:
            continue
        for _ in range(5):
            d = [F(rng.randint(-10, 10), rng.randint(1, 3)) for _ in range(mat.ground_size)]
            basis = Generator((i, 1) for i in matroid_greedy(mat, d))
            best = min(b.dot(d) for b in enumerate_bases(mat))
            matroid_checks += 1
            if basis.dot(d) != best:
                matroid_bad.append((mat, basis.dot(d), best))

    scheme_bad = []
    for t in range(100):
        net = _random_scheme_network(rng)
        d = [F(rng.randint(-5, 10), rng.randint(1, 3)) for _ in range(net.graph.num_edges)]
        result = scheme_oracle(net, d)
        best = min(s.dot(d) for s in enumerate_schemes(net))
        if result.cost != best or result.generator.dot(d) != best:
            scheme_bad.append((t, result.cost, best))

    ok = not (karp_bad or mst_bad or matroid_bad or scheme_bad)
    report(6, ok, f"karp {300 - len(karp_bad)}/300, mst {300 - len(mst_bad)}/300, "
                  f"matroid {matroid_checks - len(matroid_bad)}/{matroid_checks}, "
                  f"schemes {100 - len(scheme_bad)}/100")
    assert not karp_bad, karp_bad[:5]
    assert not mst_bad, mst_bad[:5]
    assert not matroid_bad, matroid_bad[:5]
    assert not scheme_bad, scheme_bad[:5]


def _complete_graph(n):
    g = Graph(n)
    for u in range(n):
        for v in range(u + 1, n):
            g.add_edge(u, v, 1)
    return g


def _tree_opt(graph):
    trees = enumerate_trees(graph)
    instance = treepack_instance(graph)
    return len(trees), exact_simplex(explicit_lp(instance, trees)).value


def test_criterion_7_application_cross_checks(report):
    notes = []
    ok = True
    k4 = _complete_graph(4)
    count, opt = _tree_opt(k4)
    ok &= count == 16 and opt == 2
    for eps in EPSILONS:
        value = solve_treepack(k4, eps).solution.objective
        ok &= F(value) >= 2 * (1 - eps)
    notes.append(f"K4 trees={count} OPT={opt}")

    triangle = _complete_graph(3)
    count, opt = _tree_opt(triangle)
    ok &= count == 3 and opt == F(3, 2)
    for eps in EPSILONS:
        value = solve_treepack(triangle, eps).solution.objective
        ok &= F(3, 2) * (1 - eps) <= F(value) <= F(3, 2)
    notes.append(f"triangle OPT={opt}")

    rng = random.Random(7)
    graphs = [k4, triangle] + [random_connected_graph(rng, rng.randint(3, 6), rng.randint(0, 5)) for _ in range(8)]
    worst = 0.0
    for g in graphs:
        ones = [1] * g.num_edges
        for eps in (F(1, 5), F(1, 10)):
            tree = solve_treepack(g, eps, capacities=ones).solution.objective
            base = solve_basepack(GraphicMatroid(g), eps, capacities=ones).solution.objective
            worst = max(worst, abs(tree - base) / max(abs(tree), 1e-300))
    ok &= worst <= 1e-9
    notes.append(f"basepack vs treepack rel diff {worst:.1e}")

    edge = Digraph(2, source=0, sink=1)
    edge.add_edge(0, 1, 1, 0, 1)
    for eps in EPSILONS:
        value = solve_budget_maxflow(edge, 1, eps).solution.objective
        ok &= 1 - eps <= F(value) <= 1
    notes.append("single edge OPT=1")

    report(7, bool(ok), ", ".join(notes))
    assert ok


def test_criterion_8_adapter_consistency(report):
    rng = random.Random(8)
    checks = 0
    bad = []
    for t in range(1000):
        n = rng.randint(1, 5)
        gens = list({Generator((j, rng.randint(1, 3)) for j in rng.sample(range(n), rng.randint(1, n)))
                     for _ in range(rng.randint(1, 6))})
        d = [F(rng.randint(-3, 3)) for _ in range(n)]
        best = min(g.dot(d) for g in gens)

        minimizer = ExplicitSet(gens)
        ans = minimizer(d)
        ok = isinstance(ans, Certificate) and ans.generator in gens and ans.generator.dot(d) == best == ans.cost

        sign = minimizing_as_sign(minimizer)
        ans = sign(d)
        ok &= sign.level == Level.SIGN and isinstance(ans, Certificate) and ans.generator in gens
        ok &= isinstance(ans, Certificate) and (ans.generator.dot(d) > 0) == (best > 0) \
            and (ans.generator.dot(d) < 0) == (best < 0) and (ans.generator.dot(d) == 0) == (best == 0)

        sep = sign_as_separation(sign)
        ans = sep(d)
        ok &= sep.level == Level.SEPARATION
        if best < 0:
            ok &= isinstance(ans, Certificate) and ans.generator in gens and ans.generator.dot(d) < 0
        else:
            ok &= ans is ALL_NON_NEGATIVE
        checks += 1
        if not ok:
            bad.append((t, d, best))
    report(8, not bad, f"{checks - len(bad)}/{checks} cost vectors satisfy all three level contracts")
    assert not bad, bad[:5]


def test_criterion_9_performance(report):
    graph, budget = random_flow_network(random.Random(9), 500, 5000)
    eps = F(1, 10)
    start = time.perf_counter()
    result = solve_budget_maxflow(graph, budget, eps)
    elapsed = time.perf_counter() - start
    m = graph.num_edges + 1  # capacity rows plus the budget row
    limit = _augment_limit(eps, m)
    iterations = result.solution.iterations
    ok = elapsed < 60 and iterations <= limit and result.solution.feasible
    report(9, ok, f"n=500 m=5000 eps=0.1: {elapsed:.1f}s, {iterations} iterations (bound {limit:.3g})")
    assert elapsed < 60
    assert iterations <= limit
    assert result.solution.feasible
