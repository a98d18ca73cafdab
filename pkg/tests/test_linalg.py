from fractions import Fraction

from hypothesis import given, strategies as st

from floerfam import linalg
from floerfam.novikov import NovikovScalar

from conftest import scalars

T = NovikovScalar.T

real_scalars = st.lists(st.tuples(st.fractions(-2, 2, max_denominator=2), st.integers(-3, 3)), max_size=2).map(
    lambda ts: NovikovScalar(ts))


@st.composite
def matrices(draw, entries=real_scalars):
    r, c = draw(st.integers(1, 5)), draw(st.integers(1, 5))
    m = {}
    for i in range(r):
        row = {j: draw(entries) for j in range(c)}
        row = {j: v for j, v in row.items() if not v.is_zero()}
        if row:
            m[i] = row
    # planted dependency: a combination of the first two rows
    if draw(st.booleans()) and 0 in m and 1 in m:
        a, b = draw(real_scalars), draw(real_scalars)
        dep = {}
        for j in set(m[0]) | set(m[1]):
            v = a * m[0].get(j, NovikovScalar.zero()) + b * m[1].get(j, NovikovScalar.zero())
            if not v.is_zero():
                dep[j] = v
        if dep:
            m[r] = dep
    return m


@given(matrices())
def test_polynomial_and_series_ranks_agree(m):
    assert linalg.rank(m, "polynomial") == linalg.rank(m, "novikov")


@given(matrices(entries=scalars(max_terms=2)))
def test_auto_rank_with_gaussian_entries(m):
    assert linalg.rank(m) == linalg.rank(m, "novikov")


def test_rank_examples():
    one = NovikovScalar.one()
    assert linalg.rank({0: {0: one, 1: T()}, 1: {0: T(), 1: T(2)}}) == 1
    assert linalg.rank({0: {0: one - T()}, 1: {1: one + T()}}) == 2


def test_solve_checks_against_product():
    one = NovikovScalar.one()
    m = {0: {0: one - T(), 1: T()}, 1: {1: one + T(Fraction(1, 2))}}
    rhs = {0: one, 1: T()}
    x = linalg.solve(m, rhs)
    got = linalg.mat_vec(m, x)
    for r, v in rhs.items():
        assert got.get(r, NovikovScalar.zero()).agrees_with(v)
    assert linalg.solve({0: {0: one}, 1: {0: one}}, {0: one, 1: 2 * one}) is None


def test_rational_routines():
    rows = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
    assert linalg.rational_rank(rows) == 1
    null = linalg.rational_nullspace(rows, 2)
    assert len(null) == 1 and null[0][0] + 2 * null[0][1] == 0
    assert linalg.rational_solve([[Fraction(1), Fraction(1)], [Fraction(1), Fraction(-1)]],
                                 [Fraction(3), Fraction(1)]) == [Fraction(2), Fraction(1)]
    assert linalg.integer_scale([Fraction(1, 2), Fraction(-1, 3)]) == [3, -2]


def test_determinant_over_integers():
    assert linalg.determinant([[2, 1], [1, 3]], 0, 1) == 5
