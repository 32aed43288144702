from fractions import Fraction as F

import numpy as np
import pytest

from conepack import (
    ALL_NON_NEGATIVE,
    Certificate,
    ExplicitSet,
    FunctionOracle,
    Generator,
    Level,
    as_separation,
    minimizing_as_sign,
    normalize_certificate,
    sign_as_separation,
)
from conepack.errors import FormatError, ZeroGenerator
from conepack.oracles import NormalizingOracle, OracleKind

G10 = Generator.from_dense([1, 0])
G01 = Generator.from_dense([0, 1])
G11 = Generator.from_dense([1, 1])


def test_minimizing_example(t1_set):
    # costs 2, 3, 5
    assert t1_set([2, 3]) == Certificate(G10, 2)


def test_separation_example(t1_set):
    sep = t1_set.with_level(Level.SEPARATION)
    assert sep([-1, 1]) == Certificate(G10, -1)
    assert sep([1, 1]) is ALL_NON_NEGATIVE
    assert sep([0, 0]) is ALL_NON_NEGATIVE


def test_sign_at_zero(t1_set):
    answer = t1_set.with_level(Level.SIGN)([0, 0])
    assert isinstance(answer, Certificate)
    assert answer.cost == 0


def test_float_fast_path_matches_exact(t1_set):
    sep = t1_set.with_level(Level.SEPARATION)
    assert sep(np.array([2.0, 3.0])) is ALL_NON_NEGATIVE
    answer = sep(np.array([0.5, -1.0]))
    assert answer.generator == G01
    assert answer.cost == pytest.approx(-1.0)
    assert t1_set(np.array([2.0, 3.0])).generator == G10


@pytest.mark.parametrize("d, sign, gen", [([-1, 1], -1, G10), ([1, 1], 1, None), ([1, -1], -1, G01)])
def test_minimizing_as_sign(t1_set, d, sign, gen):
    oracle = minimizing_as_sign(t1_set)
    assert oracle.level == Level.SIGN
    answer = oracle(d)
    assert (answer.cost > 0) - (answer.cost < 0) == sign
    if gen is not None:
        assert answer.generator == gen


def test_minimizing_as_sign_needs_minimizer(t1_set):
    with pytest.raises(ValueError):
        minimizing_as_sign(t1_set.with_level(Level.SIGN))


@pytest.mark.parametrize("cost, passes", [(-3, True), (0, False), (2, False)])
def test_sign_as_separation(cost, passes):
    inner = FunctionOracle(lambda d: Certificate(G10, cost), Level.SIGN)
    answer = sign_as_separation(inner)([0, 0])
    if passes:
        assert answer == Certificate(G10, -3)
    else:
        assert answer is ALL_NON_NEGATIVE


def test_sign_as_separation_rejects_weaker():
    with pytest.raises(ValueError):
        sign_as_separation(FunctionOracle(lambda d: ALL_NON_NEGATIVE, Level.SEPARATION))


def test_as_separation_keeps_separation(t1_set):
    sep = t1_set.with_level(Level.SEPARATION)
    assert as_separation(sep) is sep
    assert as_separation(t1_set).level == Level.SEPARATION


@pytest.mark.parametrize("raw, expected", [([2, 4], [F(1, 2), 1]), ([1, 0], [1, 0])])
def test_normalize(raw, expected):
    assert normalize_certificate(raw) == Generator.from_dense(expected)


def test_normalize_zero():
    with pytest.raises(ZeroGenerator):
        normalize_certificate([0, 0])


def test_normalizing_oracle_recomputes_cost():
    inner = FunctionOracle(lambda d: Certificate(Generator.from_dense([2, 4]), -10), Level.SEPARATION)
    answer = NormalizingOracle(inner)([1, -1])
    assert answer == Certificate(Generator.from_dense([F(1, 2), 1]), F(-1, 2))


def test_all_non_negative_singleton():
    from conepack.oracles import AllNonNegative
    assert AllNonNegative() is ALL_NON_NEGATIVE
    assert repr(ALL_NON_NEGATIVE) == "ALL_NON_NEGATIVE"


def test_level_ordering():
    assert Level.MINIMIZING < Level.SIGN < Level.SEPARATION


def test_oracle_kind_uniform_cost():
    assert OracleKind(Level.MINIMIZING, F(1)).uniform_cost == 1
    with pytest.raises(ValueError):
        OracleKind(Level.MINIMIZING, 0)


def test_explicit_set_json():
    s = ExplicitSet.from_json('{"generators": [["1/2", 0], [1, 1]]}', n=2)
    assert s.generators == (Generator.from_dense([F(1, 2), 0]), G11)
    assert ExplicitSet.from_dict(s.to_dict(2)).generators == s.generators
    with pytest.raises(FormatError):
        ExplicitSet.from_dict({"generators": [[1, 0, 0]]}, n=2)
    with pytest.raises(FormatError):
        ExplicitSet.from_dict({})
    with pytest.raises(ValueError):
        ExplicitSet([])


def test_first_minimizer_wins():
    s = ExplicitSet([G10, G01])
    assert s([1, 1]).generator == G10
