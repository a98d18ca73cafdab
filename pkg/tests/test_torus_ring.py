from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from floerfam.novikov import NovikovScalar
from floerfam.torus_ring import (LaurentElement, TorusPoint, ZeroInput, brute_force_zeros, eval_at_point,
                                 exp_poly_zeros, parse_laurent, parse_point, real_line_substitute)

from conftest import scalars

T = NovikovScalar.T


def L(text, n=1):
    return parse_laurent(text, n)


def test_eval_examples():
    assert eval_at_point(L("z1 - 1"), TorusPoint.of(NovikovScalar.one())).is_zero()
    assert eval_at_point(L("z1 - T"), TorusPoint.of(T())).is_zero()
    assert eval_at_point(L("z1*z2 + T", 2), TorusPoint.of(T(), T(2))) == T(3) + T(1)


def test_real_line_substitute_examples():
    one = LaurentElement.one(1, real=True)
    assert real_line_substitute(L("z1*z2**-1", 2), (1, 1)) == one
    z = LaurentElement.monomial((Fraction(1),), 1, 1, real=True)
    z2 = LaurentElement.monomial((Fraction(2),), 1, 1, real=True)
    assert real_line_substitute(L("z1 + z2", 2), (1, 2)) == z + z2
    assert real_line_substitute(L("z1 - z2", 2), (1, 1)).is_zero()


def test_zeros_examples():
    assert exp_poly_zeros(L("z - T")).zeros == (Fraction(1),)
    assert exp_poly_zeros(L("z**2 - (1+T)*z + T")).zeros == (Fraction(0), Fraction(1))
    got = exp_poly_zeros(L("z - 2"))
    assert got.zeros == () and got.candidates == (Fraction(0),)


def test_zeros_of_zero_rejected():
    with pytest.raises(ZeroInput):
        exp_poly_zeros(LaurentElement.zero(1, real=True))


def test_point_parsing():
    p = parse_point("(T^(1/2), 2)")
    assert p.n == 2 and p.coords[0] == T(Fraction(1, 2))
    assert p * p.inverse() == TorusPoint.identity(2)


laurents = st.dictionaries(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), scalars(nonzero=True, max_terms=2),
                           max_size=3).map(lambda d: LaurentElement(2, d))
points = st.tuples(scalars(nonzero=True, max_terms=1), scalars(nonzero=True, max_terms=1)).map(
    lambda c: TorusPoint(c))


@given(laurents, laurents, points)
def test_evaluation_is_a_ring_map(f, g, p):
    assert eval_at_point(f * g, p) == eval_at_point(f, p) * eval_at_point(g, p)
    assert eval_at_point(f + g, p) == eval_at_point(f, p) + eval_at_point(g, p)


@given(st.lists(st.tuples(st.fractions(-3, 3, max_denominator=3), st.fractions(-3, 3, max_denominator=3), st.sampled_from([-2, -1, 1, 3])),
                min_size=1, max_size=6))
def test_zeros_match_brute_force(terms):
    f = LaurentElement(1, {(r,): NovikovScalar.monomial(c, e) for r, e, c in terms}, real=True)
    if f.is_zero():
        return
    assert exp_poly_zeros(f).zeros == brute_force_zeros(f)


@given(st.fractions(-3, 3, max_denominator=4), st.fractions(-3, 3, max_denominator=4), st.fractions(1, 3, max_denominator=2))
def test_factored_zeros_are_found(s, u, a):
    # (z^a - T^s)(z - T^u) vanishes at t = s/a and t = u
    z = LaurentElement.monomial((Fraction(1),), 1, 1, real=True)
    za = LaurentElement.monomial((a,), 1, 1, real=True)
    f = (za - LaurentElement.monomial((Fraction(0),), T(s), 1, real=True)) * \
        (z - LaurentElement.monomial((Fraction(0),), T(u), 1, real=True))
    assert set(exp_poly_zeros(f).zeros) == {s / a, u}
