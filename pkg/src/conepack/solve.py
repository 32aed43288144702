"""One-call driver choosing the right loop and initial bound."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bounds import find_initial_bound, has_positive_generator, parametric_initial_bound, round_down
from .engine import run_general, run_uniform, scale_to_feasible
from .instance import ApproxParams, PackingInstance, Solution, SolveLog, to_fraction
from .oracles import ExplicitSet, Level, Oracle

__all__ = ["SolveResult", "solve", "uniform_cost_of"]

BOUND_MODES = ("weak", "parametric")


@dataclass
class SolveResult:
    solution: Solution
    log: SolveLog
    mode: str  # "uniform" or "general"
    initial_lower: float | None = None
    bound_probes: int = 0


def uniform_cost_of(instance: PackingInstance, oracle: ExplicitSet) -> Fraction | None:
    """The shared positive objective of an explicit generator list, if there is one."""
    costs = {g.dot(instance.costs) for g in oracle.generators}
    if len(costs) == 1:
        (cost,) = costs
        if cost > 0:
            return cost
    return None


def solve(instance: PackingInstance, oracle: Oracle, epsilon, *, uniform_cost=None,
          bound: str = "weak", record_steps: bool = False, max_iterations: int | None = None) -> SolveResult:
    """Approximately maximize ``c^T x`` over ``A x <= b`` and the oracle's cone.

    With ``uniform_cost`` (which needs a minimizing oracle) the simple loop is
    used; otherwise the general loop starts from a weak (grid search) or
    parametric (exact) initial bound.
    """
    params = ApproxParams.create(epsilon, instance.num_rows)
    if uniform_cost is None and isinstance(oracle, ExplicitSet) and oracle.level == Level.MINIMIZING:
        uniform_cost = uniform_cost_of(instance, oracle)
    if uniform_cost is not None:
        if oracle.level != Level.MINIMIZING:
            raise ValueError("the uniform-cost loop needs a minimizing oracle")
        solution, trace = run_uniform(instance, params, oracle, to_fraction(uniform_cost),
                                      max_iterations=max_iterations, record_steps=record_steps)
        return SolveResult(solution, trace, "uniform")

    if bound not in BOUND_MODES:
        raise ValueError(f"bound must be one of {BOUND_MODES}")
    if not has_positive_generator(oracle, instance.costs):
        solution = scale_to_feasible(instance, np.zeros(instance.num_cols), params)
        return SolveResult(solution, SolveLog(record_steps=record_steps), "general")

    probes = 0
    if bound == "weak":
        found = find_initial_bound(instance, params, oracle)
        lower, probes = float(found), found.probes
    else:
        # the engine's float duals can sit an ulp below the exact initial ones
        lower = round_down(parametric_initial_bound(instance, params, oracle).lam) * (1 - 1e-12)
    solution, trace = run_general(instance, params, oracle, lower, max_iterations=max_iterations,
                                  record_steps=record_steps)
    return SolveResult(solution, trace, "general", lower, probes)
