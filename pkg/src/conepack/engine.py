"""Multiplicative-weights packing loop over an oracle-described cone.

Two drivers share the dual bookkeeping:

* :func:`run_uniform` for generator sets whose objective ``c^T x`` is one
  positive constant; it needs a minimizing oracle.
* :func:`run_general` for arbitrary signed objectives; it needs only a
  separation oracle plus a positive lower bound on the most violated dual
  ratio, which it raises geometrically whenever the oracle reports no
  violation at ``(1 + eps)`` times the bound.

Duals, reduced costs and the running primal are floats.  Oracles whose
answers hinge on exact signs (the minimum mean cycle oracle, for one) lift the
float costs to the rationals they denote; ``exact_costs=True`` does the lifting
in the engine instead, for oracles that cannot.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import (
    BoundNotLower,
    ConePackError,
    CostMismatch,
    InfeasibleAfterScaling,
    IterationCapExceeded,
    ZeroLoad,
)
from .instance import (
    ApproxParams,
    DualState,
    Generator,
    PackingInstance,
    Solution,
    SolveLog,
    Step,
    compute_reduced_costs,
    init_duals,
    to_fraction,
)
from .oracles import Certificate, Oracle, as_separation
from .verify import check_feasible

log = logging.getLogger(__name__)

__all__ = [
    "EngineConfig",
    "augment_bound",
    "raise_bound",
    "step_size",
    "augment",
    "run_uniform",
    "run_general",
    "scale_to_feasible",
    "RECOMPUTE_EVERY",
]

RECOMPUTE_EVERY = 1000
COST_RTOL = 1e-9
FEASIBILITY_RTOL = 1e-9


@dataclass(frozen=True)
class EngineConfig:
    params: ApproxParams
    uniform_cost: Fraction | None = None
    initial_lower: float | None = None
    max_iterations: int | None = None

    def __post_init__(self):
        if (self.uniform_cost is None) == (self.initial_lower is None):
            raise ValueError("choose exactly one of uniform_cost or initial_lower")
        if self.initial_lower is not None and not self.initial_lower > 0:
            raise ValueError("the initial lower bound must be positive")

    def run(self, instance: PackingInstance, oracle: Oracle, **kwargs):
        if self.uniform_cost is not None:
            return run_uniform(instance, self.params, oracle, self.uniform_cost,
                               max_iterations=self.max_iterations, **kwargs)
        return run_general(instance, self.params, oracle, self.initial_lower,
                           max_iterations=self.max_iterations, **kwargs)


def augment_bound(num_rows: int, eps_prime) -> float:
    """Worst-case number of augment steps, ``(1/eps') m (1 + log_{1+eps'} m)``."""
    ep = float(eps_prime)
    return (1.0 / ep) * num_rows * (1.0 + math.log(num_rows) / math.log1p(ep))


def raise_bound(num_rows: int, epsilon, delta: float) -> float:
    """Worst-case number of bound raises, ``log_{1+eps}((1+eps) m^{m/eps} / delta) + 1``."""
    eps = float(epsilon)
    log_value = math.log1p(eps) + (num_rows / eps) * math.log(num_rows) - math.log(delta)
    return log_value / math.log1p(eps) + 1.0


def step_size(instance: PackingInstance, g: Generator):
    """Largest multiple of ``g`` a single row admits.

    Returns ``(nu, rows, loads)`` where ``loads[k] = A_{rows[k]} . g > 0``.
    """
    idx = g.indices
    if len(idx) == 1:
        j = idx[0]
        rows = instance.col_rows[j]
        loads = instance.col_vals[j] * float(g.values[0])
    else:
        fv = g.float_values
        all_rows = np.concatenate([instance.col_rows[j] for j in idx])
        all_vals = np.concatenate([instance.col_vals[j] * fv[k] for k, j in enumerate(idx)])
        rows, inverse = np.unique(all_rows, return_inverse=True)
        loads = np.bincount(inverse, weights=all_vals, minlength=len(rows))
    positive = loads > 0
    if not positive.all():
        rows, loads = rows[positive], loads[positive]
    if len(rows) == 0:
        raise ZeroLoad(f"{g!r} loads no row")
    nu = float(np.min(instance.b_float[rows] / loads))
    return nu, rows, loads


def augment(state: DualState, instance: PackingInstance, params: ApproxParams,
            g: Generator, nu: float, rows: np.ndarray, loads: np.ndarray) -> DualState:
    """Add ``nu * g`` to the raw primal and raise the duals of loaded rows."""
    state.raw_primal[g.index_array] += nu * g.float_values
    share = np.minimum(nu * loads / instance.b_float[rows], 1.0)
    old = state.y[rows]
    new = old * (1.0 + float(params.epsilon_prime) * share)
    state.y[rows] = new
    grow = new - old
    state.dual_value += float(np.dot(instance.b_float[rows], grow))
    for i, dy in zip(rows.tolist(), grow.tolist()):
        state.a[instance.row_cols[i]] += dy * instance.row_vals[i]
    state.iterations += 1
    if state.iterations % RECOMPUTE_EVERY == 0:
        _refresh(state, instance)
    return state


def _refresh(state: DualState, instance: PackingInstance) -> None:
    # bound the drift of the incremental updates
    state.a = compute_reduced_costs(instance, state.y)
    state.dual_value = float(np.dot(instance.b_float, state.y))
    if not np.all(state.a > 0):
        raise ConePackError("reduced costs lost positivity")


def _iteration_cap(instance: PackingInstance, params: ApproxParams, general: bool) -> int:
    total = augment_bound(instance.num_rows, params.epsilon_prime) + instance.num_rows
    if general:
        total += raise_bound(instance.num_rows, params.epsilon, params.delta)
    return int(math.ceil(10 * total)) + 10


def run_uniform(instance: PackingInstance, params: ApproxParams, oracle: Oracle, uniform_cost,
                *, max_iterations: int | None = None, record_steps: bool = True,
                callback: Callable[[DualState, SolveLog], None] | None = None):
    """Packing loop for generator sets with constant positive objective ``uniform_cost``.

    Each iteration asks the minimizing oracle for the cheapest generator under
    ``a / uniform_cost`` and augments along it until ``b^T y >= 1``.
    """
    c_hat = to_fraction(uniform_cost)
    if c_hat <= 0:
        raise ValueError("uniform cost must be positive")
    c_hat_f = float(c_hat)
    cap = max_iterations or _iteration_cap(instance, params, general=False)
    state = init_duals(instance, params)
    trace = SolveLog(record_steps=record_steps)
    calls = 0
    while state.dual_value < 1.0:
        if state.iterations >= cap:
            raise IterationCapExceeded(f"no termination after {cap} iterations")
        answer = oracle(state.a / c_hat_f)
        calls += 1
        if not isinstance(answer, Certificate):
            raise ConePackError("a minimizing oracle must always return a generator")
        g = answer.generator
        cost = sum((instance.costs[j] * v for j, v in g.items()), Fraction(0))
        if abs(cost - c_hat) > COST_RTOL * c_hat:
            raise CostMismatch(f"generator cost {cost} differs from the uniform cost {c_hat}")
        nu, rows, loads = step_size(instance, g)
        augment(state, instance, params, g, nu, rows, loads)
        if record_steps:
            trace.steps.append(Step(g, nu, "augment"))
        if callback is not None:
            callback(state, trace)
    solution = scale_to_feasible(instance, state.raw_primal, params)
    solution.iterations = state.iterations
    solution.augment_steps = state.iterations
    solution.oracle_calls = calls
    trace.final_scale = params.scale_factor
    return solution, trace


def _exact_costs(a: np.ndarray, probe: float, costs) -> list[Fraction]:
    lam = Fraction(probe)
    return [Fraction(aj) - lam * cj for aj, cj in zip(a.tolist(), costs)]


def run_general(instance: PackingInstance, params: ApproxParams, oracle: Oracle, initial_lower,
                *, max_iterations: int | None = None, record_steps: bool = True,
                exact_costs: bool = False,
                lambda_star: Callable[[DualState], Fraction] | None = None,
                callback: Callable[[DualState, SolveLog], None] | None = None):
    """Packing loop for signed objectives with a lower bound on the violation ratio.

    ``oracle`` may have any strength; it is queried as a separation oracle at
    ``a - (1 + eps) * lower * c``.  A certificate is an approximately most
    violated constraint and triggers an augment step, otherwise the lower bound
    is multiplied by ``1 + eps``.  When the number of raises exceeds the
    worst-case bound for a valid initial bound, no positive-cost generator can
    exist any more and the loop stops with what it has.

    ``lambda_star`` (testing aid) computes the exact current most violated
    ratio; it is used to assert that the lower bound stays a lower bound.
    """
    lower = float(initial_lower)
    if not lower > 0:
        raise ValueError("the initial lower bound must be positive")
    sep = as_separation(oracle)
    eps = float(params.epsilon)
    state = init_duals(instance, params)
    trace = SolveLog(record_steps=record_steps)
    trace.lambda_lower.append(lower)

    if all(cj <= 0 for cj in instance.costs):
        log.warning("no positive objective coefficient; returning the zero solution")
        solution = scale_to_feasible(instance, state.raw_primal, params)
        trace.final_scale = params.scale_factor
        return solution, trace

    if lambda_star is not None and Fraction(lower) > lambda_star(state):
        raise BoundNotLower(f"initial bound {lower} exceeds the most violated ratio")

    cap = max_iterations or _iteration_cap(instance, params, general=True)
    max_raises = raise_bound(instance.num_rows, params.epsilon, params.delta)
    raises = 0
    calls = 0
    steps = 0
    while state.dual_value < 1.0:
        if steps >= cap:
            raise IterationCapExceeded(f"no termination after {cap} iterations")
        probe = (1.0 + eps) * lower
        if exact_costs:
            d = _exact_costs(state.a, probe, instance.costs)
        else:
            d = state.a - probe * instance.c_float
        answer = sep(d)
        calls += 1
        steps += 1
        if isinstance(answer, Certificate):
            g = answer.generator
            nu, rows, loads = step_size(instance, g)
            augment(state, instance, params, g, nu, rows, loads)
            if record_steps:
                trace.steps.append(Step(g, nu, "augment"))
        else:
            lower = probe
            raises += 1
            trace.lambda_lower.append(lower)
            if record_steps:
                trace.steps.append(Step(None, 0.0, "bound-raise"))
            if raises > max_raises:
                log.warning("lower bound passed its cap after %d raises; stopping", raises)
                break
        if lambda_star is not None and Fraction(lower) > lambda_star(state):
            raise BoundNotLower(f"lower bound {lower} exceeds the most violated ratio")
        if callback is not None:
            callback(state, trace)

    solution = scale_to_feasible(instance, state.raw_primal, params)
    solution.iterations = steps
    solution.augment_steps = state.iterations
    solution.bound_raises = raises
    solution.oracle_calls = calls
    trace.final_scale = params.scale_factor
    return solution, trace


def scale_to_feasible(instance: PackingInstance, raw_primal: np.ndarray, params: ApproxParams) -> Solution:
    """Divide the accumulated primal by ``log_{1+eps'}((1+eps')/delta)``.

    Feasibility is then checked exactly.  A violation caused by float rounding
    (relative size at most 1e-9) is removed by shrinking ``x`` slightly; a
    larger violation is a numeric failure.
    """
    x = np.asarray(raw_primal, dtype=float) / params.scale_factor
    feasible, worst = check_feasible(instance, x)
    for _ in range(8):
        if feasible:
            break
        if worst > FEASIBILITY_RTOL:
            raise InfeasibleAfterScaling(f"relative violation {float(worst):.3e} after scaling")
        x = x * (1.0 - 2.0 * max(float(worst), 1e-15))
        feasible, worst = check_feasible(instance, x)
    if not feasible:
        raise InfeasibleAfterScaling("could not restore exact feasibility")
    objective = float(np.dot(instance.c_float, x))
    return Solution(x=x, objective=objective, feasible=True, iterations=0, oracle_calls=0,
                    worst_violation=worst)
