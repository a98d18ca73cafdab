import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from floerfam.affinoid_domains import (BISECTION_STEPS, EmptyPolytope, NotInterior, Polytope, Refusal,
                                       SampledPointNotAcyclic, TiedLeadingTerms, Unbounded, point_over,
                                       semicontinuity_shrink, shrink_polytope_invertibility,
                                       sup_norm_over_polytope, tropical_envelope)
from floerfam.sheaf_analysis import complex_from_dict, rank_at_point
from floerfam.torus_ring import eval_at_point, parse_laurent

F = Fraction
units = st.fractions(-3, 3, max_denominator=3).filter(lambda u: u != 0)


def f1(text):
    return parse_laurent(text, 1)


def f2(text):
    return parse_laurent(text, 2)


def abs_exponent(f, nu, unit):
    """|f(x)| = e^{-val f(x)} at an actual point over nu."""
    return eval_at_point(f, point_over(nu, unit)).val


def cx(entries, basis):
    return complex_from_dict({"ring_rank": 1, "basis": [{"id": b, "degree": d} for b, d in basis],
                              "d": [{"from": a, "to": b, "entry": e} for a, b, e in entries]})


TRIANGLE = Polytope([((-1, 0), 1), ((0, -1), 1), ((1, 1), 1)])


# ------------------------------------------------------------ polytopes

def test_box_and_triangle_vertices():
    assert Polytope.box([-1], [2]).vertices() == [(F(-1),), (F(2),)]
    assert sorted(TRIANGLE.vertices()) == [(F(-1), F(-1)), (F(-1), F(2)), (F(2), F(-1))]
    assert TRIANGLE.has_interior_origin()
    assert not Polytope.box([F(1, 4)], [1]).has_interior_origin()


def test_degenerate_polytopes():
    quadrant = Polytope([((1, 0), 1), ((0, 1), 1)])
    assert not quadrant.is_bounded()
    with pytest.raises(Unbounded):
        quadrant.vertices()
    with pytest.raises(EmptyPolytope):
        Polytope.box([1], [0]).require_nonempty()


def test_polytope_round_trip_and_scaling():
    P = Polytope.box([-1, F(-1, 2)], [2, 3])
    assert Polytope.from_dict(P.to_dict()) == P
    assert P.scaled(F(1, 2)) == Polytope.box([F(-1, 2), F(-1, 4)], [1, F(3, 2)])
    assert P.intersect(Polytope.box([0, 0], [1, 1])) == Polytope.box([0, 0], [1, 1])


@given(st.integers(0, 10 ** 6))
def test_random_points_lie_inside(seed):
    rng = random.Random(seed)
    for P in (TRIANGLE, Polytope.box([-2], [F(1, 3)])):
        assert P.contains(P.random_point(rng))


# ------------------------------------------------------------ envelopes

def test_envelope_examples():
    env = tropical_envelope(f1("z - T"))
    assert sorted(c for _, c in env.pieces) == [0, 1]
    assert env.breakpoints() == [1]
    assert len(tropical_envelope(f1("7*T^2")).pieces) == 1
    assert tropical_envelope(f1("z + z^-1")).breakpoints() == [0]


# ------------------------------------------------------------ sup norm

def test_sup_norm_examples():
    r = sup_norm_over_polytope(f1("T"), Polytope.box([-1], [1]))
    assert r.exponent == 1
    r = sup_norm_over_polytope(f1("z"), Polytope.box([-1], [1]))
    assert r.exponent == -1 and r.vertex == (F(-1),)
    assert sup_norm_over_polytope(f1("1 + T*z"), Polytope.box([0], [1])).exponent == 0


def test_sup_norm_tail_flag():
    P = Polytope.box([0], [1])
    assert sup_norm_over_polytope(f1("1 + T*z"), P, tail_bound=F(1, 2)).tail_dominated
    assert not sup_norm_over_polytope(f1("1 + T*z"), P, tail_bound=0).tail_dominated


@given(st.sampled_from(["z1*z2 + T*z1^-1 + 2", "T^(1/2)*z1 - z2^2 + T^3", "z1 - z2 + T^2*z1^-1*z2"]),
       st.integers(0, 10 ** 6), st.lists(units, min_size=2, max_size=2))
def test_sup_norm_dominates_points(text, seed, unit):
    f = f2(text)
    P = TRIANGLE
    res = sup_norm_over_polytope(f, P)
    rng = random.Random(seed)
    for _ in range(5):
        assert abs_exponent(f, P.random_point(rng), unit) >= res.exponent
    assert abs_exponent(f, res.vertex, [F(7, 5), F(-11, 3)]) == res.exponent


# ------------------------------------------------------------ shrinking

def test_shrink_examples():
    P = Polytope.box([F(-1, 2)], [F(1, 2)])
    r = shrink_polytope_invertibility(f1("1 + T*z"), P, F(1, 2))
    assert r.delta == 1 and r.polytope == P
    with pytest.raises(TiedLeadingTerms):
        shrink_polytope_invertibility(f1("z - 1"), P)
    with pytest.raises(NotInterior):
        shrink_polytope_invertibility(f1("T + z^2"), Polytope.box([F(1, 4)], [1]))


def test_shrink_bisects_when_needed():
    r = shrink_polytope_invertibility(f1("1 + T*z"), Polytope.box([-3], [3]))
    assert 0 < r.delta < 1 and r.steps == BISECTION_STEPS
    assert r.delta <= F(1, 3) < r.delta + F(1, 2 ** BISECTION_STEPS)


def test_shrink_refuses_unreachable_bound():
    with pytest.raises(Refusal):
        shrink_polytope_invertibility(f1("T^2 + T^3*z"), Polytope.box([-1], [1]), 1)


@given(st.sampled_from([("1 + T*z1 + T^2*z2^-1", 0), ("3 - T*z1*z2 + T^(1/2)*z2", F(1, 4)),
                        ("T^-1 + z1^2 + z2", 0)]),
       st.integers(0, 10 ** 6), st.lists(units, min_size=2, max_size=2))
def test_shrink_output_is_bounded_away_from_zero(case, seed, unit):
    text, m = case
    f = f2(text)
    r = shrink_polytope_invertibility(f, Polytope.box([-2, -2], [2, 2]), m)
    env = tropical_envelope(f)
    rng = random.Random(seed)
    for _ in range(4):
        nu = r.polytope.random_point(rng)
        q = abs_exponent(f, nu, unit)
        assert q <= m
        assert q == env.value(nu)


# ------------------------------------------------------------ semicontinuity

def test_semicontinuity_of_invertible_map():
    C = cx([("a", "b", "1 + T*z")], [("a", 0), ("b", 1)])
    P = Polytope.box([F(-1, 2)], [F(1, 2)])
    res = semicontinuity_shrink(C, P, samples=10)
    assert res.delta == 1 and res.validated


def test_semicontinuity_componentwise():
    C = cx([("a", "c", "1 + T*z"), ("b", "d", "2 + T^2*z")], [("a", 0), ("b", 0), ("c", 1), ("d", 1)])
    P = Polytope.box([-3], [3])
    res = semicontinuity_shrink(C, P, samples=10)
    single = shrink_polytope_invertibility(f1("1 + T*z"), P)
    assert res.delta == single.delta
    assert res.validated
    rng = random.Random(5)
    for _ in range(20):
        nu = res.polytope.random_point(rng)
        assert sum(rank_at_point(C, point_over(nu, [F(rng.choice([1, 2, 3]), 2)])).values()) == 0


def test_semicontinuity_refuses_non_acyclic():
    C = cx([("a", "b", "z - 1")], [("a", 0), ("b", 1)])
    P = Polytope.box([F(-1, 2)], [F(1, 2)])
    with pytest.raises(SampledPointNotAcyclic) as exc:
        semicontinuity_shrink(C, P, samples=5)
    assert sum(exc.value.ranks.values()) == 2
    with pytest.raises(TiedLeadingTerms):
        semicontinuity_shrink(C, P, samples=5, include_identity=False)
