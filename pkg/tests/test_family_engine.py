import random

import pytest
from hypothesis import given, strategies as st

from floerfam.ainf_modules import check_module_relations, cone, diagonal, is_closed, modules_equal, tabulate
from floerfam.bar_convolution import StrictFunctor, graph_bimodule, module_complex
from floerfam.decoration import PointCharacter
from floerfam.decoration import Decoration
from floerfam.family_engine import (DecorationInconsistent, DecorationMismatch, action_cone_report,
                                    build_decorated_yoneda_family, build_local_system_family, collapse_reports,
                                    grouplike_check, rescale_generators, restrict_family, seeded_pairs,
                                    seeded_points)
from floerfam.fixtures import build_fixture
from floerfam.novikov import NovikovScalar
from floerfam.sheaf_analysis import random_point
from floerfam.torus_ring import TorusPoint

T = NovikovScalar.T
ONE = NovikovScalar.one()


def corrupted_random():
    cat, deco = build_fixture("random")
    addr = next(e.address for e in cat.entries if e.inputs == ("x1_2", "x0_1"))
    deco.set(addr, [(0, 0), (1, 0)])
    return cat, deco


def test_zero_decoration_gives_constant_family():
    cat, _ = build_fixture("circle")
    fam = build_local_system_family(cat, Decoration(1))
    for p in seeded_points(1, 4, 3):
        assert modules_equal(restrict_family(fam, p), diagonal(cat), 4)


@pytest.mark.parametrize("name", ["circle", "torus", "random"])
def test_restriction_at_identity_is_diagonal(name):
    cat, deco = build_fixture(name)
    fam = build_local_system_family(cat, deco)
    assert modules_equal(restrict_family(fam, TorusPoint.identity(deco.rank)), diagonal(cat), 4)


@pytest.mark.parametrize("name", ["circle", "torus"])
def test_restriction_agrees_with_fiber_built_directly(name):
    cat, deco = build_fixture(name)
    fam = build_local_system_family(cat, deco)
    for p in seeded_points(deco.rank, 5, 1):
        fiber = restrict_family(fam, p)
        assert modules_equal(fiber, fam.at(p), 4)
        assert check_module_relations(fiber, 4).passed


@pytest.mark.parametrize("name", ["circle", "torus"])
def test_unitary_restriction_is_character_twist(name):
    cat, deco = build_fixture(name)
    fam = build_local_system_family(cat, deco)
    rng = random.Random(4)
    for _ in range(4):
        p = random_point(rng, deco.rank, unitary=True)
        twist = graph_bimodule(cat, StrictFunctor(PointCharacter(p)), fam.dcat)
        assert modules_equal(restrict_family(fam, p), twist, 4)


def test_rescale_by_zero_is_identity():
    cat, _ = build_fixture("circle")
    dg = diagonal(cat)
    new, iso = rescale_generators(dg, {})
    assert modules_equal(new, dg, 4)
    assert is_closed(iso, 3)


@given(st.lists(st.fractions(-3, 3, max_denominator=4), min_size=6, max_size=6))
def test_rescale_on_random_fixture(heights):
    cat, _ = build_fixture("random")
    dg = diagonal(cat)
    g = dict(zip(sorted(dg.gens), heights))
    new, iso = rescale_generators(dg, g)
    old_t, new_t = tabulate(dg, 2), tabulate(new, 2)
    for (left, m, right), out in old_t.items():
        for y, c in out.items():
            assert new_t[(left, m, right)][y] == c * T(g[m] - g[y])
    assert check_module_relations(new, 3).passed
    assert is_closed(iso, 3)
    assert module_complex(cone(iso, None)).total_cohomology() == 0


@pytest.mark.parametrize("name", ["circle", "torus", "random"])
def test_action_map_is_quasi_iso(name):
    cat, deco = build_fixture(name)
    fam = build_local_system_family(cat, deco)
    for obj in cat.objects:
        h = build_decorated_yoneda_family(cat, obj, deco)
        for p in seeded_points(deco.rank, 5, 2):
            rep = action_cone_report(h, fam, p, 2)
            assert rep.acyclic, (obj, str(p), rep.as_dict())


def test_corrupted_decoration_is_refused_upstream():
    cat, deco = corrupted_random()
    with pytest.raises(DecorationInconsistent) as exc:
        build_local_system_family(cat, deco)
    assert exc.value.report.failure_lengths == [3]


def test_corrupted_decoration_breaks_the_action_map():
    cat, deco = corrupted_random()
    fam = build_local_system_family(cat, deco, check=False)
    h = build_decorated_yoneda_family(cat, "O2", deco, check=False)
    p = TorusPoint.of(T(1) * 2, ONE * 3)
    rep = action_cone_report(h, fam, p, 2)
    assert not rep.is_complex and not rep.acyclic


@pytest.mark.parametrize("name", ["circle", "torus"])
def test_collapses_on_fibers(name):
    cat, deco = build_fixture(name)
    fam = build_local_system_family(cat, deco)
    for p in seeded_points(deco.rank, 3, 5):
        reps = collapse_reports(fam, p, 2)
        assert len(reps) == 1 + len(cat.objects) ** 2
        assert all(r.acyclic for r in reps.values())


def test_grouplike_including_inverse_pair():
    cat, deco = build_fixture("circle")
    fam = build_local_system_family(cat, deco)
    pairs = seeded_pairs(1, 4, 0)
    assert str(pairs[0][0] * pairs[0][1]) == str(TorusPoint.identity(1))
    rep = grouplike_check(fam, pairs, N=1)
    assert rep.identity_is_diagonal
    assert rep.passed, rep.as_dict()


def test_seeded_samples_are_reproducible():
    assert [str(p) for p in seeded_points(2, 6, 9)] == [str(p) for p in seeded_points(2, 6, 9)]
    assert str(seeded_points(2, 1, 9)[0]) == str(TorusPoint.identity(2))
    assert len(seeded_pairs(2, 7, 1)) == 7


def test_mismatched_lattices():
    cat, deco = build_fixture("torus")
    fam = build_local_system_family(cat, deco)
    with pytest.raises(DecorationMismatch):
        restrict_family(fam, TorusPoint.identity(1))
    other = Decoration(2)
    h = build_decorated_yoneda_family(cat, "L1", other)
    with pytest.raises(DecorationMismatch):
        action_cone_report(h, fam, TorusPoint.identity(2), 1)
