"""Initial lower bounds on the most violated dual ratio.

Two strategies feed :func:`conepack.engine.run_general`:

* :func:`find_initial_bound` brackets ``lam*`` between ``delta / M^3`` and
  ``delta * M^3`` and binary-searches a geometric grid with ratio
  ``m^(m/eps)`` using separation queries only.
* :func:`parametric_initial_bound` computes ``lam*`` exactly by parametric
  search; it needs a sign oracle, or a separation oracle that is upgraded.

Both work on the reduced costs of the initial duals ``y_i = delta / b_i``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BoundBelowRange, NoPositiveCostGenerator
from .instance import ApproxParams, PackingInstance, compute_reduced_costs, to_fraction
from .oracles import Certificate, NormalizingOracle, Oracle, as_separation
from .parametric import most_violated

log = logging.getLogger(__name__)

__all__ = [
    "compute_M",
    "BoundBracket",
    "BoundResult",
    "bracket",
    "grid_ratio",
    "initial_reduced_costs",
    "find_initial_bound",
    "parametric_initial_bound",
    "has_positive_generator",
    "round_down",
]


def _magnitude(v: Fraction) -> int:
    return max(abs(v.numerator), v.denominator)


def compute_M(instance: PackingInstance) -> int:
    """Largest number in the input; a rational counts as ``max(|num|, den)``."""
    values = [instance.num_rows, instance.num_cols]
    values += [_magnitude(b) for b in instance.capacities]
    values += [_magnitude(c) for c in instance.costs]
    values += [_magnitude(v) for row in instance.rows_exact for _, v in row]
    return max(values)


def _integer_root(value: int, k: int) -> int:
    """``floor(value ** (1/k))`` for non-negative integers."""
    lo, hi = 0, 1 << (value.bit_length() // k + 1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid ** k <= value:
            lo = mid
        else:
            hi = mid
    return lo


def grid_ratio(num_rows: int, epsilon) -> Fraction:
    """The integer ``floor(m^(m/eps))``; ``m = 1`` falls back to 2.

    Stepping by anything no larger than ``m^(m/eps)`` keeps the bracket
    guarantee.  Huge ratios are capped since they only matter through the
    (then single) grid point.
    """
    m = max(2, num_rows)
    log_g = (m / float(epsilon)) * math.log(m)
    if log_g > 600:
        return Fraction(2) ** 860
    power = m / to_fraction(epsilon)
    if power.denominator <= 64:
        return Fraction(max(2, _integer_root(m ** power.numerator, power.denominator)))
    return Fraction(max(2, math.floor(math.exp(log_g) * (1 - 1e-12))))


@dataclass(frozen=True)
class BoundBracket:
    lambda_lo: Fraction
    lambda_hi: Fraction
    M: int
    exponent_range: int
    ratio: Fraction

    def candidate(self, k: int) -> Fraction:
        return self.lambda_lo * self.ratio ** k


def bracket(instance: PackingInstance, params: ApproxParams) -> BoundBracket:
    M = compute_M(instance)
    delta = Fraction(params.delta)
    lo = delta / M ** 3
    hi = delta * M ** 3
    ratio = grid_ratio(instance.num_rows, params.epsilon)
    # candidates k = 0..K-1; the top one times the ratio reaches lambda_hi
    K = 1
    span = hi / lo
    while ratio ** K <= span:
        K += 1
    return BoundBracket(lo, hi, M, K, ratio)


def initial_reduced_costs(instance: PackingInstance, params: ApproxParams) -> list[Fraction]:
    delta = Fraction(params.delta)
    return compute_reduced_costs(instance, [delta / b for b in instance.capacities])


def round_down(value: Fraction) -> float:
    """Largest convenient float not above ``value``."""
    f = float(value)
    if Fraction(f) > value:
        f = math.nextafter(f, 0.0)
    return f


def has_positive_generator(oracle: Oracle, costs) -> bool:
    """Whether some generator has ``c^T x > 0`` (one separation query at ``-c``)."""
    answer = as_separation(oracle)([-Fraction(c) for c in costs])
    return isinstance(answer, Certificate)


@dataclass
class BoundResult:
    lower: Fraction
    bracket: BoundBracket
    probes: int
    exponent: int

    def __float__(self) -> float:
        return round_down(self.lower)


def find_initial_bound(instance: PackingInstance, params: ApproxParams, oracle: Oracle) -> BoundResult:
    """Largest grid point ``lam_lo * G^k`` whose separation probe finds no violation.

    A probe at ``lam`` without certificate proves ``lam <= lam*``; a
    certificate proves ``lam > lam*``.  When the top grid point passes, one
    more point above it is checked, and the search keeps climbing if that
    passes too (only possible when the data break the integrality premises of
    the ``delta * M^3`` upper end).
    """
    sep = NormalizingOracle(as_separation(oracle))
    a = initial_reduced_costs(instance, params)
    c = instance.costs
    br = bracket(instance, params)
    probes = 0

    def passes(k: int) -> bool:
        nonlocal probes
        probes += 1
        lam = br.candidate(k)
        return not isinstance(sep([aj - lam * cj for aj, cj in zip(a, c)]), Certificate)

    lo, hi = -1, br.exponent_range
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(mid):
            lo = mid
        else:
            hi = mid
    if lo < 0:
        raise BoundBelowRange("even the smallest candidate exceeds the most violated ratio")
    if lo == br.exponent_range - 1:
        k = lo + 1
        while passes(k):
            log.warning("grid point %d passes above the bracket; climbing", k)
            lo, k = k, k + 1
            if k > br.exponent_range + 4096:
                raise NoPositiveCostGenerator("no finite bound found; no generator has positive objective")
    return BoundResult(br.candidate(lo), br, probes, lo)


def parametric_initial_bound(instance: PackingInstance, params: ApproxParams, oracle: Oracle):
    """Exact ``lam*`` for the initial duals and a generator attaining it."""
    a = initial_reduced_costs(instance, params)
    return most_violated(a, instance.costs, oracle)
