from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from floerfam.novikov import (GaussianRational, NovikovScalar, ParseError, ZeroWithinPrecision, arith, invert,
                              parse_novikov, valuation)

from conftest import exponents, scalars

T = NovikovScalar.T


def test_add_keeps_terms_exact():
    a = arith(T(Fraction(1, 2)), NovikovScalar.monomial(3, 2), "add")
    assert a == NovikovScalar([(Fraction(1, 2), 1), (2, 3)])
    assert a.is_exact()


def test_difference_of_squares():
    one = NovikovScalar.one()
    assert arith(one - T(), one + T(), "mul") == one - T(2)


def test_cutoff_propagates_through_product():
    a = NovikovScalar([(0, 1)], cutoff=2)
    b = NovikovScalar([(1, 1)], cutoff=3)
    got = a * b
    # min(val a + cut b, val b + cut a) = min(3, 3)
    assert got.cutoff == 3
    assert got.terms == T(1).terms


def test_invert_monomial_exactly():
    assert invert(T()) == T(-1)


def test_invert_geometric_series():
    got = invert(NovikovScalar.one() - T(), cutoff=3)
    assert got == NovikovScalar([(0, 1), (1, 1), (2, 1)], cutoff=3)


def test_invert_zero_within_precision():
    with pytest.raises(ZeroWithinPrecision):
        invert(NovikovScalar.zero(5))


def test_valuations():
    assert valuation(T(Fraction(1, 2)) + NovikovScalar.monomial(3, 2)).value == Fraction(1, 2)
    assert valuation(NovikovScalar.zero()).is_infinite
    assert valuation(NovikovScalar.monomial(2) + T()).value == 0


def test_parse_round_trip():
    a = parse_novikov("T^(1/2) + 3*T^2 - i*T")
    assert a == T(Fraction(1, 2)) + NovikovScalar.monomial(3, 2) - NovikovScalar.monomial(GaussianRational(0, 1), 1)
    assert parse_novikov(str(a)) == a


def test_parse_error_reports_position():
    with pytest.raises(ParseError):
        parse_novikov("T^^2")


@given(scalars(), scalars(), scalars())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a - a == NovikovScalar.zero()


@given(scalars(nonzero=True), scalars(nonzero=True))
def test_valuation_is_additive(a, b):
    assert (a * b).val == a.val + b.val


@given(scalars(nonzero=True), st.integers(min_value=1, max_value=6))
def test_inverse_to_cutoff(a, rel):
    inv = a.invert(cutoff=-a.val + rel)
    prod = a * inv
    assert prod.agrees_with(NovikovScalar.one())
    assert prod.is_exact() or prod.cutoff >= rel


@given(scalars(), exponents)
def test_truncate_is_idempotent(a, cut):
    t = a.truncate(cut)
    assert t.truncate(cut) == t
    assert all(e < cut for e, _ in t.terms)
