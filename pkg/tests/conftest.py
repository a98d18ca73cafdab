from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from floerfam.novikov import GaussianRational, NovikovScalar

# derandomized so that re-runs are identical
settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

exponents = st.fractions(min_value=-4, max_value=4, max_denominator=3)
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def gaussians(draw, real_only=False):
    re = draw(rationals)
    im = Fraction(0) if real_only else draw(st.one_of(st.just(Fraction(0)), rationals))
    return GaussianRational(re, im)


@st.composite
def scalars(draw, nonzero=False, max_terms=3):
    terms = draw(st.lists(st.tuples(exponents, gaussians()), min_size=1 if nonzero else 0, max_size=max_terms))
    a = NovikovScalar(terms)
    if nonzero and a.is_zero():
        a = NovikovScalar.monomial(draw(st.sampled_from([1, -2, 3])), draw(exponents))
    return a


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
