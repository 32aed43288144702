"""Instance assembly shared by the front-ends."""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from ..instance import PackingInstance, new_instance, to_fraction

__all__ = ["ExtraRow", "build_instance", "budget_row"]

ExtraRow = tuple[Mapping[int, object], object]  # (column -> coefficient, right-hand side)


def build_instance(num_cols: int, capacities: Sequence, costs: Sequence,
                   extra_rows: Sequence[ExtraRow] = ()) -> PackingInstance:
    """Rows ``x_j <= u_j`` for the first ``len(capacities)`` columns, then ``extra_rows``."""
    triples = [(j, j, 1) for j in range(len(capacities))]
    b = list(capacities)
    for coeffs, rhs in extra_rows:
        row = len(b)
        triples.extend((row, j, v) for j, v in coeffs.items() if to_fraction(v) != 0)
        b.append(rhs)
    return new_instance(len(b), num_cols, triples, b, costs)


def budget_row(fees: Sequence, budget) -> list[ExtraRow]:
    """The ``sum fee_e x_e <= B`` row, or nothing when no fee is positive."""
    fees = [to_fraction(f) for f in fees]
    if budget is None or not any(fees):
        return []
    return [({j: f for j, f in enumerate(fees) if f}, Fraction(to_fraction(budget)))]
