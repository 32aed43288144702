"""Parametric search over affine values ``p + q * lam``.

An oracle algorithm that only adds, subtracts, scales by constants and
compares can be run on :class:`AffineValue` inputs ``a_j - lam * c_j``.  Each
comparison whose outcome depends on where the unknown optimum ``lam*`` lies is
settled by a callback at the crossing point, which also shrinks the open
interval known to contain ``lam*``.  The simulated run follows exactly the
control flow the oracle would take at ``lam*``, so its output is a most
violated generator.

Callbacks evaluate the oracle on concrete rational cost vectors; there is no
nested simulation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .errors import (
    ConePackError,
    NoPositiveCostGenerator,
    NonCombinatorialOperation,
    NonPositiveLambda,
)
from .instance import Generator, to_fraction
from .oracles import Certificate, Level, Oracle

__all__ = [
    "AffineValue",
    "SearchInterval",
    "ComparisonEvent",
    "SignDecision",
    "NEGATIVE",
    "ZERO",
    "POSITIVE",
    "FoundOptimum",
    "ParametricContext",
    "sign_decision",
    "SeparationSign",
    "separation_as_sign",
    "most_violated",
    "MostViolated",
    "simulate_combinatorial",
]

NEGATIVE, ZERO, POSITIVE = -1, 0, 1


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


class AffineValue:
    """Exact affine function ``p + q * lam`` bound to a search context."""

    __slots__ = ("p", "q", "ctx")
    __hash__ = None

    def __init__(self, p, q=0, ctx: "ParametricContext | None" = None):
        self.p = to_fraction(p)
        self.q = to_fraction(q)
        self.ctx = ctx

    def _wrap(self, p, q, other=None) -> "AffineValue":
        ctx = self.ctx
        if ctx is None and isinstance(other, AffineValue):
            ctx = other.ctx
        return AffineValue(p, q, ctx)

    @staticmethod
    def _lift(other):
        if isinstance(other, AffineValue):
            return other
        if isinstance(other, float) and not math.isfinite(other):
            return None
        try:
            return AffineValue(to_fraction(other))
        except Exception:
            return None

    @property
    def is_constant(self) -> bool:
        return self.q == 0

    def __call__(self, lam) -> Fraction:
        return self.p + self.q * to_fraction(lam)

    value_at = __call__

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._wrap(self.p + o.p, self.q + o.q, o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._wrap(self.p - o.p, self.q - o.q, o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._wrap(o.p - self.p, o.q - self.q, o)

    def __neg__(self):
        return self._wrap(-self.p, -self.q)

    def __pos__(self):
        return self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.q and o.q:
            raise NonCombinatorialOperation("product of two parametric values")
        if o.q:
            return self._wrap(o.p * self.p, o.q * self.p, o)
        return self._wrap(self.p * o.p, self.q * o.p, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o.q:
            raise NonCombinatorialOperation("division by a parametric value")
        return self._wrap(self.p / o.p, self.q / o.p, o)

    def __rtruediv__(self, other):
        if self.q:
            raise NonCombinatorialOperation("division by a parametric value")
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self.p

    def __bool__(self):
        if self.q:
            raise NonCombinatorialOperation("truth value of a parametric value")
        return bool(self.p)

    def _sign_vs(self, other) -> int | None:
        if isinstance(other, float) and math.isinf(other):
            return -1 if other > 0 else 1
        o = self._lift(other)
        if o is None:
            return None
        diff_p, diff_q = self.p - o.p, self.q - o.q
        ctx = self.ctx or o.ctx
        if diff_q == 0:
            return _sgn(diff_p)
        if ctx is None:
            raise ConePackError("comparing parametric values outside a search context")
        return ctx.sign(diff_p, diff_q, self, o)

    def __lt__(self, other):
        s = self._sign_vs(other)
        return NotImplemented if s is None else s < 0

    def __le__(self, other):
        s = self._sign_vs(other)
        return NotImplemented if s is None else s <= 0

    def __gt__(self, other):
        s = self._sign_vs(other)
        return NotImplemented if s is None else s > 0

    def __ge__(self, other):
        s = self._sign_vs(other)
        return NotImplemented if s is None else s >= 0

    def __eq__(self, other):
        s = self._sign_vs(other)
        return NotImplemented if s is None else s == 0

    def __ne__(self, other):
        s = self._sign_vs(other)
        return NotImplemented if s is None else s != 0

    def __repr__(self) -> str:
        return f"AffineValue({self.p} + {self.q}*lam)"


@dataclass
class SearchInterval:
    """Open interval ``(lo, hi)`` known to contain ``lam*``; ``hi=None`` is infinity."""

    lo: Fraction | None = Fraction(0)
    hi: Fraction | None = None

    def contains(self, value) -> bool:
        return (self.lo is None or self.lo < value) and (self.hi is None or value < self.hi)

    @property
    def width(self):
        if self.lo is None or self.hi is None:
            return math.inf
        return self.hi - self.lo


@dataclass
class ComparisonEvent:
    left: AffineValue
    right: AffineValue
    crossing: Fraction | None
    resolution: str  # "LeftLE", "LeftGT" or "FoundOptimum"


@dataclass(frozen=True)
class SignDecision:
    """Sign of ``D(lam')``, i.e. of ``lam* - lam'``, with a witnessing generator."""

    sign: int
    generator: Generator | None = None


class FoundOptimum(Exception):
    def __init__(self, lam: Fraction, generator: Generator | None):
        super().__init__(lam)
        self.lam = lam
        self.generator = generator


class ParametricContext:
    """Interval bookkeeping and comparison resolution for one simulation."""

    def __init__(self, resolver: Callable[[Fraction], SignDecision],
                 lo=Fraction(0), hi=None, stop_on_zero: bool = True):
        self.resolver = resolver
        self.interval = SearchInterval(None if lo is None else to_fraction(lo),
                                       None if hi is None else to_fraction(hi))
        self.stop_on_zero = stop_on_zero
        self.exact: Fraction | None = None
        self.events: list[ComparisonEvent] = []
        self.resolver_calls = 0
        self.comparisons = 0

    def variable(self, p, q) -> AffineValue:
        return AffineValue(p, q, self)

    def sign(self, diff_p: Fraction, diff_q: Fraction, left=None, right=None) -> int:
        """Sign of ``diff_p + diff_q * lam*``."""
        self.comparisons += 1
        if self.exact is not None:
            return _sgn(diff_p + diff_q * self.exact)
        root = -diff_p / diff_q
        iv = self.interval
        if iv.lo is not None and root <= iv.lo:
            return _sgn(diff_q)
        if iv.hi is not None and root >= iv.hi:
            return -_sgn(diff_q)
        decision = self.resolver(root)
        self.resolver_calls += 1
        if decision.sign == ZERO:
            self.events.append(ComparisonEvent(left, right, root, "FoundOptimum"))
            if self.stop_on_zero:
                raise FoundOptimum(root, decision.generator)
            self.exact = root
            return 0
        if decision.sign < 0:
            iv.hi = root
            result = -_sgn(diff_q)
        else:
            iv.lo = root
            result = _sgn(diff_q)
        self.events.append(ComparisonEvent(left, right, root, "LeftLE" if result <= 0 else "LeftGT"))
        return result

    def compare(self, left, right) -> str:
        """Resolve ``left <= right`` and report ``LeftLE``/``LeftGT``/``FoundOptimum``."""
        left = left if isinstance(left, AffineValue) else AffineValue(left, 0, self)
        right = right if isinstance(right, AffineValue) else AffineValue(right, 0, self)
        dq = left.q - right.q
        dp = left.p - right.p
        if dq == 0:
            return "LeftLE" if dp <= 0 else "LeftGT"
        before = self.exact
        s = self.sign(dp, dq, left, right)
        if self.exact is not None and before is None:
            return "FoundOptimum"
        return "LeftLE" if s <= 0 else "LeftGT"


def _costs_at(a: Sequence[Fraction], c: Sequence[Fraction], lam: Fraction) -> list[Fraction]:
    return [aj - lam * cj for aj, cj in zip(a, c)]


def sign_decision(a, c, lam, sign_oracle: Oracle) -> SignDecision:
    """Decide the sign of ``lam* - lam`` with one call to a sign oracle at ``a - lam c``."""
    lam = to_fraction(lam)
    if lam <= 0:
        raise NonPositiveLambda(f"probe value must be positive, got {lam}")
    a = [to_fraction(v) for v in a]
    c = [to_fraction(v) for v in c]
    d = _costs_at(a, c, lam)
    answer = sign_oracle(d)
    if not isinstance(answer, Certificate):
        return SignDecision(POSITIVE, None)
    cost = answer.generator.dot(d)
    return SignDecision(_sgn(cost), answer.generator)


class SeparationSign:
    """Upgrade a separation oracle to three-way sign decisions.

    A "no violation" answer at ``lam'`` leaves ``lam* = lam'`` and
    ``lam* > lam'`` open.  The oracle is then probed at ``lam' + step``: no
    violation there means ``lam* > lam'``; a certificate whose cost is exactly
    zero at ``lam'`` is a minimizer; any other certificate has its root strictly
    between ``lam'`` and ``lam' + step``, so ``step`` is halved.  Exact
    arithmetic makes the halving terminate once ``step`` drops below the gap
    to the nearest root above ``lam'``.
    """

    level = Level.SIGN
    MAX_HALVINGS = 100_000

    def __init__(self, a, c, separation_oracle: Oracle):
        self.a = [to_fraction(v) for v in a]
        self.c = [to_fraction(v) for v in c]
        self.oracle = separation_oracle
        self.last: Generator | None = None
        self.calls = 0

    def _query(self, lam: Fraction):
        self.calls += 1
        d = _costs_at(self.a, self.c, lam)
        return d, self.oracle(d)

    def __call__(self, lam, width=math.inf) -> SignDecision:
        lam = to_fraction(lam)
        if lam <= 0:
            raise NonPositiveLambda(f"probe value must be positive, got {lam}")
        d, answer = self._query(lam)
        if isinstance(answer, Certificate) and answer.generator.dot(d) < 0:
            self.last = answer.generator
            return SignDecision(NEGATIVE, answer.generator)
        if width is None or (isinstance(width, float) and math.isinf(width)):
            step = max(Fraction(1), lam) / 2
        else:
            step = max(Fraction(1), to_fraction(width)) / 2
        for _ in range(self.MAX_HALVINGS):
            _, probe = self._query(lam + step)
            if not isinstance(probe, Certificate):
                return SignDecision(POSITIVE, self.last)
            x = probe.generator
            if x.dot(d) == 0:
                self.last = x
                return SignDecision(ZERO, x)
            self.last = x
            step /= 2
        raise ConePackError("separation-to-sign upgrade did not terminate")


def separation_as_sign(a, c, separation_oracle: Oracle) -> SeparationSign:
    return SeparationSign(a, c, separation_oracle)


@dataclass
class MostViolated:
    lam: Fraction
    generator: Generator
    resolver_calls: int = 0
    comparisons: int = 0
    events: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.lam, self.generator))


def most_violated(a, c, oracle: Oracle, *, record_events: bool = False) -> MostViolated:
    """Exact ``min a^T x / c^T x`` over generators with ``c^T x > 0``.

    ``oracle`` is simulated on ``a - lam c``.  Sign and minimizing oracles
    resolve comparisons directly; separation oracles go through
    :class:`SeparationSign`.
    """
    a = [to_fraction(v) for v in a]
    c = [to_fraction(v) for v in c]
    if any(v <= 0 for v in a):
        raise ValueError("reduced costs must be strictly positive")

    if oracle.level == Level.SEPARATION:
        upgraded = SeparationSign(a, c, oracle)

        def resolver(lam):
            return upgraded(lam, ctx.interval.width)
    else:
        def resolver(lam):
            return sign_decision(a, c, lam, oracle)

    ctx = ParametricContext(resolver)
    d = [AffineValue(aj, -cj, ctx) for aj, cj in zip(a, c)]

    def result(lam, g):
        return MostViolated(lam, g, ctx.resolver_calls, ctx.comparisons,
                            ctx.events if record_events else [])

    try:
        answer = oracle(d)
    except FoundOptimum as hit:
        return result(hit.lam, hit.generator)

    if isinstance(answer, Certificate):
        g = answer.generator
        den = g.dot(c)
        if den > 0:
            lam = g.dot(a) / den
            iv = ctx.interval
            if (iv.lo is not None and lam < iv.lo) or (iv.hi is not None and lam > iv.hi):
                raise ConePackError(f"simulated oracle returned ratio {lam} outside ({iv.lo}, {iv.hi})")
            return result(lam, g)
    raise NoPositiveCostGenerator("the oracle exposes no generator with positive objective")


def simulate_combinatorial(algorithm: Callable[..., Any], inputs, resolver,
                           lo=Fraction(0), hi=None):
    """Run ``algorithm`` on affine inputs; returns ``(output, context)``.

    ``inputs`` is a sequence of ``(p, q)`` pairs or affine values.  A zero
    decision pins ``lam*`` and the run continues at that exact value, so the
    output is what the concrete algorithm returns at ``lam*``.
    """
    ctx = ParametricContext(resolver, lo, hi, stop_on_zero=False)
    values = []
    for item in inputs:
        if isinstance(item, AffineValue):
            values.append(AffineValue(item.p, item.q, ctx))
        else:
            p, q = item
            values.append(AffineValue(p, q, ctx))
    return algorithm(values), ctx
