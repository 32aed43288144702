"""Oracle access to the generator set of a cone.

Three strengths are supported.  A *minimizing* oracle returns a generator of
minimum cost ``d^T x``; a *sign* oracle returns some generator whose cost has
the sign of the minimum; a *separation* oracle returns a negative-cost
generator or declares that every generator has non-negative cost.

Oracles are plain callables ``d -> answer`` with a ``level`` attribute.  They
never hold solver state, and the ones shipped here are written against a
generic number type so they can be evaluated on floats, exact fractions or the
affine values of :mod:`conepack.parametric`.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .errors import FormatError
from .instance import Generator

__all__ = [
    "Level",
    "Certificate",
    "AllNonNegative",
    "ALL_NON_NEGATIVE",
    "OracleKind",
    "Oracle",
    "FunctionOracle",
    "ExplicitSet",
    "minimizing_as_sign",
    "sign_as_separation",
    "as_separation",
    "normalize_certificate",
    "NormalizingOracle",
    "sign_of",
]


class Level(enum.IntEnum):
    """Oracle strength; a lower value is a stronger oracle."""

    MINIMIZING = 0
    SIGN = 1
    SEPARATION = 2


@dataclass(frozen=True)
class Certificate:
    generator: Generator
    cost: Any


class AllNonNegative:
    """Verdict that ``d^T x >= 0`` for every generator."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ALL_NON_NEGATIVE"


ALL_NON_NEGATIVE = AllNonNegative()


@dataclass(frozen=True)
class OracleKind:
    level: Level
    uniform_cost: Any = None  # positive constant c^T x shared by all generators, if any

    def __post_init__(self):
        if self.uniform_cost is not None and not self.uniform_cost > 0:
            raise ValueError("a uniform cost must be positive")


def sign_of(value) -> int:
    if value < 0:
        return -1
    if value > 0:
        return 1
    return 0


class Oracle:
    """Base class; subclasses implement :meth:`query`."""

    level: Level = Level.SEPARATION

    def query(self, d):
        raise NotImplementedError

    def __call__(self, d):
        return self.query(d)


class FunctionOracle(Oracle):
    def __init__(self, fn: Callable, level: Level):
        self.fn = fn
        self.level = Level(level)

    def query(self, d):
        return self.fn(d)


class ExplicitSet(Oracle):
    """Reference oracle over an enumerated generator list.

    It always finds the first minimizer; the answer is shaped to ``level``.
    """

    def __init__(self, generators: Sequence[Generator], level: Level = Level.MINIMIZING):
        generators = [g if isinstance(g, Generator) else Generator.from_dense(g) for g in generators]
        if not generators:
            raise ValueError("an explicit generator set must be non-empty")
        self.generators = tuple(generators)
        self.level = Level(level)
        self._dense = None

    def __len__(self) -> int:
        return len(self.generators)

    def with_level(self, level: Level) -> "ExplicitSet":
        return ExplicitSet(self.generators, level)

    def _float_matrix(self, n: int) -> np.ndarray:
        if self._dense is None or self._dense.shape[1] != n:
            dense = np.zeros((len(self.generators), n))
            for row, g in enumerate(self.generators):
                dense[row, g.index_array] = g.float_values
            self._dense = dense
        return self._dense

    def query(self, d):
        if isinstance(d, np.ndarray) and d.dtype.kind == "f":
            costs = self._float_matrix(len(d)) @ d
            pick = int(np.argmin(costs))
            if self.level == Level.SEPARATION and not costs[pick] < 0:
                return ALL_NON_NEGATIVE
            return Certificate(self.generators[pick], float(costs[pick]))
        best = None
        best_cost = None
        for g in self.generators:
            cost = g.dot(d)
            if best is None or cost < best_cost:
                best, best_cost = g, cost
        if self.level == Level.SEPARATION and not best_cost < 0:
            return ALL_NON_NEGATIVE
        return Certificate(best, best_cost)

    def to_dict(self, n: int) -> dict:
        from .instance import format_fraction

        return {"generators": [[format_fraction(v) for v in g.to_dense(n)] for g in self.generators]}

    @classmethod
    def from_dict(cls, data, n: int | None = None, level: Level = Level.MINIMIZING) -> "ExplicitSet":
        try:
            rows = data["generators"]
        except (KeyError, TypeError) as exc:
            raise FormatError("explicit set needs a 'generators' list") from exc
        gens = []
        for row in rows:
            if n is not None and len(row) != n:
                raise FormatError(f"generator has {len(row)} entries, expected {n}")
            gens.append(Generator.from_dense(row))
        return cls(gens, level)

    @classmethod
    def from_json(cls, text: str, n: int | None = None, level: Level = Level.MINIMIZING) -> "ExplicitSet":
        return cls.from_dict(json.loads(text), n, level)


class _MinimizingAsSign(Oracle):
    level = Level.SIGN

    def __init__(self, inner: Oracle):
        self.inner = inner

    def query(self, d):
        return self.inner(d)


def minimizing_as_sign(oracle: Oracle) -> Oracle:
    """A minimizer trivially satisfies the sign contract."""
    if oracle.level != Level.MINIMIZING:
        raise ValueError("minimizing_as_sign needs a minimizing oracle")
    return _MinimizingAsSign(oracle)


class _SignAsSeparation(Oracle):
    level = Level.SEPARATION

    def __init__(self, inner: Oracle):
        self.inner = inner

    def query(self, d):
        answer = self.inner(d)
        if isinstance(answer, Certificate) and answer.cost < 0:
            return answer
        return ALL_NON_NEGATIVE


def sign_as_separation(oracle: Oracle) -> Oracle:
    if oracle.level > Level.SIGN:
        raise ValueError("sign_as_separation needs a sign or minimizing oracle")
    return _SignAsSeparation(oracle)


def as_separation(oracle: Oracle) -> Oracle:
    """Downgrade any oracle to separation strength."""
    if oracle.level == Level.SEPARATION:
        return oracle
    return _SignAsSeparation(oracle)


def normalize_certificate(g: Generator) -> Generator:
    """Rescale ``g`` so that its largest entry is exactly one."""
    if not isinstance(g, Generator):
        g = Generator.from_dense(g)
    return g.scaled(1 / g.max_entry())


class NormalizingOracle(Oracle):
    """Wrap an oracle so that every returned generator has max entry 1."""

    def __init__(self, inner: Oracle):
        self.inner = inner
        self.level = inner.level

    def query(self, d):
        answer = self.inner(d)
        if not isinstance(answer, Certificate):
            return answer
        g = normalize_certificate(answer.generator)
        return Certificate(g, g.dot(d))
