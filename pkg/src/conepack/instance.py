"""Packing instances over cones, approximation parameters and solver state.

A packing instance is ``max c^T x  s.t.  A x <= b,  x in C`` where ``A`` is a
sparse non-negative matrix, ``b`` is positive and ``C`` is the cone spanned by
a (possibly huge) set of non-negative generators that is only reachable through
an oracle.  Instance data is stored exactly as :class:`fractions.Fraction`;
float mirrors of the matrix are built once for the multiplicative-weights loop.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse

from .errors import (
    EmptyRowOrColumn,
    FormatError,
    IndexOutOfRange,
    InvalidInstance,
    NegativeMatrixEntry,
    NonPositiveCapacity,
    NonPositiveDual,
    ZeroGenerator,
)

__all__ = [
    "to_fraction",
    "format_fraction",
    "PackingInstance",
    "new_instance",
    "Generator",
    "ApproxParams",
    "DualState",
    "Step",
    "SolveLog",
    "Solution",
    "init_duals",
    "compute_reduced_costs",
]


def to_fraction(value: Any) -> Fraction:
    """Convert ints, floats (exactly), Fractions and ``"p/q"``/decimal strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise FormatError(f"not a number: {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise FormatError(f"non-finite number: {value!r}")
        return Fraction(float(value))
    if isinstance(value, (np.integer,)):
        return Fraction(int(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"cannot parse rational {value!r}") from exc
    raise FormatError(f"not a number: {value!r}")


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class PackingInstance:
    """Immutable sparse packing instance ``(A, b, c)``.

    Row-major and column-major adjacency are built at construction, both as
    exact fractions and as numpy float arrays.
    """

    __slots__ = (
        "num_rows", "num_cols", "triples", "capacities", "costs",
        "rows_exact", "cols_exact", "row_cols", "row_vals", "col_rows",
        "col_vals", "b_float", "c_float", "matrix_csr",
    )

    def __init__(self, num_rows, num_cols, triples, capacities, costs):
        self.num_rows = num_rows
        self.num_cols = num_cols
        self.triples = triples
        self.capacities = capacities
        self.costs = costs
        rows = [[] for _ in range(num_rows)]
        cols = [[] for _ in range(num_cols)]
        for i, j, v in triples:
            rows[i].append((j, v))
            cols[j].append((i, v))
        self.rows_exact = tuple(tuple(r) for r in rows)
        self.cols_exact = tuple(tuple(c) for c in cols)
        self.row_cols = tuple(np.array([j for j, _ in r], dtype=np.int64) for r in rows)
        self.row_vals = tuple(np.array([float(v) for _, v in r]) for r in rows)
        self.col_rows = tuple(np.array([i for i, _ in c], dtype=np.int64) for c in cols)
        self.col_vals = tuple(np.array([float(v) for _, v in c]) for c in cols)
        self.b_float = np.array([float(v) for v in capacities])
        self.c_float = np.array([float(v) for v in costs])
        self.matrix_csr = sparse.csr_matrix(
            (
                [float(v) for _, _, v in triples],
                ([i for i, _, _ in triples], [j for _, j, _ in triples]),
            ),
            shape=(num_rows, num_cols),
        )

    @property
    def m(self) -> int:
        return self.num_rows

    @property
    def n(self) -> int:
        return self.num_cols

    @property
    def nnz(self) -> int:
        return len(self.triples)

    def __repr__(self) -> str:
        return f"PackingInstance(m={self.num_rows}, n={self.num_cols}, nnz={self.nnz})"

    def to_dict(self) -> dict:
        return {
            "m": self.num_rows,
            "n": self.num_cols,
            "triples": [[i, j, format_fraction(v)] for i, j, v in self.triples],
            "b": [format_fraction(v) for v in self.capacities],
            "c": [format_fraction(v) for v in self.costs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "PackingInstance":
        try:
            return new_instance(data["m"], data["n"], data["triples"], data["b"], data["c"])
        except KeyError as exc:
            raise FormatError(f"instance is missing field {exc.args[0]!r}") from exc

    @classmethod
    def from_json(cls, text: str) -> "PackingInstance":
        return cls.from_dict(json.loads(text))


def new_instance(m: int, n: int, triples: Iterable, b: Sequence, c: Sequence) -> PackingInstance:
    """Validate and build a :class:`PackingInstance`.

    Zero matrix values are dropped; every row and column must keep at least one
    positive entry.
    """
    if not isinstance(m, int) or not isinstance(n, int) or m <= 0 or n <= 0:
        raise InvalidInstance(f"dimensions must be positive integers, got m={m!r}, n={n!r}")
    b = tuple(to_fraction(v) for v in b)
    c = tuple(to_fraction(v) for v in c)
    if len(b) != m:
        raise InvalidInstance(f"expected {m} capacities, got {len(b)}")
    if len(c) != n:
        raise InvalidInstance(f"expected {n} costs, got {len(c)}")
    for i, v in enumerate(b):
        if v <= 0:
            raise NonPositiveCapacity(f"capacity b[{i}] = {v} is not positive")

    stored = {}
    for t in triples:
        i, j, v = t
        i, j = int(i), int(j)
        if not (0 <= i < m and 0 <= j < n):
            raise IndexOutOfRange(f"entry ({i}, {j}) outside a {m}x{n} matrix")
        v = to_fraction(v)
        if v < 0:
            raise NegativeMatrixEntry(f"A[{i}][{j}] = {v} is negative")
        if v == 0:
            continue
        if (i, j) in stored:
            raise InvalidInstance(f"duplicate entry ({i}, {j})")
        stored[(i, j)] = v

    seen_rows = {i for i, _ in stored}
    seen_cols = {j for _, j in stored}
    if len(seen_rows) != m:
        missing = min(set(range(m)) - seen_rows)
        raise EmptyRowOrColumn(f"row {missing} has no positive entry")
    if len(seen_cols) != n:
        missing = min(set(range(n)) - seen_cols)
        raise EmptyRowOrColumn(f"column {missing} has no positive entry")

    ordered = tuple((i, j, v) for (i, j), v in sorted(stored.items()))
    return PackingInstance(m, n, ordered, b, c)


class Generator:
    """A non-zero, non-negative sparse vector of the cone's ground set."""

    __slots__ = ("indices", "values", "_index_array", "_float_values")

    def __init__(self, entries: Mapping[int, Any] | Iterable[tuple[int, Any]]):
        if isinstance(entries, Mapping):
            entries = entries.items()
        merged: dict[int, Fraction] = {}
        for j, v in entries:
            v = to_fraction(v)
            if v < 0:
                raise ValueError(f"generator entry {j} is negative ({v})")
            if v:
                merged[int(j)] = merged.get(int(j), Fraction(0)) + v
        if not merged:
            raise ZeroGenerator("generators must have a positive entry")
        items = sorted(merged.items())
        self.indices = tuple(j for j, _ in items)
        self.values = tuple(v for _, v in items)
        self._index_array = None
        self._float_values = None

    @classmethod
    def from_dense(cls, values: Sequence) -> "Generator":
        return cls((j, v) for j, v in enumerate(values))

    @property
    def index_array(self) -> np.ndarray:
        if self._index_array is None:
            self._index_array = np.array(self.indices, dtype=np.int64)
        return self._index_array

    @property
    def float_values(self) -> np.ndarray:
        if self._float_values is None:
            self._float_values = np.array([float(v) for v in self.values])
        return self._float_values

    def items(self):
        return zip(self.indices, self.values)

    def max_entry(self) -> Fraction:
        return max(self.values)

    def dot(self, d):
        """``d^T x`` for any number-like cost vector (floats, Fractions, affine values)."""
        if isinstance(d, np.ndarray):
            return float(np.dot(d[self.index_array], self.float_values))
        total = 0
        for j, v in zip(self.indices, self.values):
            total = total + d[j] * v
        return total

    def scaled(self, factor) -> "Generator":
        factor = to_fraction(factor)
        return Generator((j, v * factor) for j, v in self.items())

    def to_dense(self, n: int) -> list[Fraction]:
        out = [Fraction(0)] * n
        for j, v in self.items():
            out[j] = v
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Generator):
            return NotImplemented
        return self.indices == other.indices and self.values == other.values

    def __hash__(self) -> int:
        return hash((self.indices, self.values))

    def __repr__(self) -> str:
        body = ", ".join(f"{j}: {format_fraction(v)}" for j, v in self.items())
        return f"Generator({{{body}}})"


@dataclass(frozen=True)
class ApproxParams:
    """Accuracy ``epsilon``, its half ``epsilon_prime`` and the initial dual scale ``delta``."""

    epsilon: Fraction
    epsilon_prime: Fraction
    delta: float
    num_rows: int

    @classmethod
    def create(cls, epsilon, num_rows: int) -> "ApproxParams":
        eps = to_fraction(epsilon)
        if not 0 < eps < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
        if num_rows < 1:
            raise ValueError("num_rows must be positive")
        eps_prime = eps / 2
        ep = float(eps_prime)
        log_delta = math.log1p(ep) - math.log((1 + ep) * num_rows) / ep
        delta = math.exp(log_delta)
        if delta <= 0.0:
            raise ValueError("delta underflows double precision; use a larger epsilon")
        return cls(eps, eps_prime, delta, num_rows)

    @property
    def log_delta(self) -> float:
        ep = float(self.epsilon_prime)
        return math.log1p(ep) - math.log((1 + ep) * self.num_rows) / ep

    @property
    def scale_factor(self) -> float:
        """``log_{1+eps'}((1+eps')/delta)``, the final primal down-scaling."""
        ep = float(self.epsilon_prime)
        return (math.log1p(ep) - self.log_delta) / math.log1p(ep)


@dataclass
class DualState:
    y: np.ndarray
    a: np.ndarray
    raw_primal: np.ndarray
    dual_value: float
    iterations: int = 0


def compute_reduced_costs(instance: PackingInstance, y):
    """``a_j = sum_i y_i A_ij``.

    Float input (numpy array or list of floats) takes the sparse float path;
    a sequence containing Fractions is evaluated exactly.
    """
    if len(y) != instance.num_rows:
        raise ValueError(f"expected {instance.num_rows} duals, got {len(y)}")
    if any(v <= 0 for v in y):
        raise NonPositiveDual("every dual weight must be strictly positive")
    if not isinstance(y, np.ndarray) and any(isinstance(v, (Fraction, int)) for v in y):
        y = [to_fraction(v) for v in y]
        return [sum((y[i] * v for i, v in col), Fraction(0)) for col in instance.cols_exact]
    y = np.asarray(y, dtype=float)
    return np.asarray(instance.matrix_csr.T @ y).ravel()


def init_duals(instance: PackingInstance, params: ApproxParams) -> DualState:
    y = params.delta / instance.b_float
    a = compute_reduced_costs(instance, y)
    return DualState(
        y=y,
        a=a,
        raw_primal=np.zeros(instance.num_cols),
        dual_value=float(np.dot(instance.b_float, y)),
    )


@dataclass
class Step:
    generator: Generator
    nu: float
    kind: str  # "augment" or "bound-raise"


@dataclass
class SolveLog:
    steps: list[Step] = field(default_factory=list)
    lambda_lower: list[float] = field(default_factory=list)
    final_scale: float = 0.0
    record_steps: bool = True

    @property
    def augment_count(self) -> int:
        return sum(1 for s in self.steps if s.kind == "augment")

    @property
    def raise_count(self) -> int:
        return sum(1 for s in self.steps if s.kind == "bound-raise")

    def to_dict(self) -> dict:
        return {
            "final_scale": self.final_scale,
            "lambda_lower": self.lambda_lower,
            "steps": [
                {
                    "kind": s.kind,
                    "nu": s.nu,
                    "generator": (
                        None if s.generator is None
                        else [[j, format_fraction(v)] for j, v in s.generator.items()]
                    ),
                }
                for s in self.steps
            ],
        }


@dataclass
class Solution:
    x: np.ndarray
    objective: float
    feasible: bool
    iterations: int
    oracle_calls: int
    worst_violation: Fraction = Fraction(0)
    augment_steps: int = 0
    bound_raises: int = 0
