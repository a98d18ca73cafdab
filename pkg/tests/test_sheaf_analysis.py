import random
from fractions import Fraction

import pytest

from floerfam.complexes import FiniteComplex
from floerfam.decoration import Decoration
from floerfam.family_engine import build_local_system_family
from floerfam.fixtures import build_fixture
from floerfam.novikov import NovikovScalar
from floerfam.sheaf_analysis import (AllMinorsZero, NotCocycle, UnitNotDesignated, complex_from_dict,
                                     complex_to_dict, exactness_locus, floer_sheaf, line_point, random_point,
                                     rank_at_point, rank_stratification, real_line_exceptional_set,
                                     stabilizer_locus)
from floerfam.ainf_core import ValidationError
from floerfam.torus_ring import TorusPoint, parse_laurent

ONE = NovikovScalar.one()
T = NovikovScalar.T


def complex_of(d, degrees, n=1, grading="z"):
    """d: list of (from, to, entry text)."""
    return complex_from_dict({"ring_rank": n, "grading": grading,
                              "basis": [{"id": b, "degree": k} for b, k in degrees.items()],
                              "d": [{"from": x, "to": y, "entry": e} for x, y, e in d]})


def line(entry, n=1):
    return complex_of([("a", "b", entry)], {"a": 0, "b": 1}, n)


def pt(*xs):
    return TorusPoint.of(*xs)


def nz(ranks):
    return {k: v for k, v in ranks.items() if v}


# ------------------------------------------------------------ floer_sheaf

def test_zero_decoration_gives_constant_complex():
    cat, _ = build_fixture("circle")
    C = floer_sheaf(build_local_system_family(cat, Decoration(1)), "L", "L")
    assert all(v.is_constant() for col in C.d.values() for v in col.values())


def test_circle_sheaf_has_z_dependent_entry():
    cat, deco = build_fixture("circle")
    C = floer_sheaf(build_local_system_family(cat, deco), "L", "L")
    entries = [v for col in C.d.values() for v in col.values() if not v.is_zero()]
    assert entries and any(not v.is_constant() for v in entries)
    assert nz(rank_at_point(C, pt(ONE))) == {0: 1, 1: 1}
    assert nz(rank_at_point(C, pt(ONE * 2))) == {}


def test_torus_sheaf_jumps_on_a_coordinate_circle():
    cat, deco = build_fixture("torus")
    C = floer_sheaf(build_local_system_family(cat, deco), "L1", "L1")
    assert C.dim == 2
    assert sum(rank_at_point(C, pt(ONE, T(1) * 3)).values()) == 2
    assert sum(rank_at_point(C, pt(T(1), ONE)).values()) == 0


def test_unknown_object():
    cat, deco = build_fixture("circle")
    with pytest.raises(ValueError):
        floer_sheaf(build_local_system_family(cat, deco), "L", "nowhere")


# ------------------------------------------------------------ rank_at_point

def test_rank_at_point_examples():
    C = line("z - 1")
    assert nz(rank_at_point(C, pt(ONE * 2))) == {}
    assert nz(rank_at_point(C, pt(ONE))) == {0: 1, 1: 1}


def test_z2_rank_identity():
    C = complex_of([("a", "b", "z - 1"), ("c", "b", "z - T")], {"a": 0, "b": 1, "c": 0}, grading="z2")
    rng = random.Random(0)
    pts = [pt(ONE), pt(T(1)), pt(ONE * 2)] + [random_point(rng, 1) for _ in range(10)]
    for p in pts:
        Cp = C.specialize(p)
        assert rank_at_point(C, p)["total"] + 2 * Cp.rank_d() == C.dim


# ------------------------------------------------------------ stratification

def test_strata_of_z_minus_one():
    s = rank_stratification(line("z - 1"))
    assert nz(s.generic_cohomology()) == {}
    strata = {tuple(sorted(nz(x["cohomology"]).items())): x["locus"] for x in s.strata()}
    assert set(strata) == {(), ((0, 1), (1, 1))}
    jump = strata[((0, 1), (1, 1))]
    assert jump.contains(pt(ONE)) and not jump.contains(pt(ONE * 2))
    cert = s.blocks[0].certificate
    assert parse_laurent(cert["minor"], 1) == parse_laurent("z - 1", 1)
    assert cert["value"] != "0"


def test_zero_differential_has_one_stratum():
    C = complex_of([], {"a": 0, "b": 1})
    s = rank_stratification(C)
    assert len(s.strata()) == 1
    assert nz(s.generic_cohomology()) == {0: 1, 1: 1}


def test_nested_strata_of_diagonal_differential():
    C = complex_of([("a", "b", "z - 1"), ("c", "d", "z - T")], {"a": 0, "c": 0, "b": 1, "d": 1})
    s = rank_stratification(C)
    assert s.blocks[0].generic_rank == 2
    assert nz(s.predict(pt(ONE * 2))) == {}
    assert nz(s.predict(pt(ONE))) == {0: 1, 1: 1}
    assert nz(s.predict(pt(T(1)))) == {0: 1, 1: 1}
    rank1 = s.blocks[0].at_least(2, 1)
    assert not rank1.contains(pt(ONE)) and rank1.contains(pt(ONE * 3))


@pytest.mark.parametrize("name,obj", [("circle", "L"), ("torus", "L1"), ("torus", "L2")])
def test_stratification_matches_pointwise_ranks(name, obj):
    cat, deco = build_fixture(name)
    C = floer_sheaf(build_local_system_family(cat, deco), obj, obj)
    s = rank_stratification(C)
    rng = random.Random(11)
    pts = s.candidate_points(rng, 3) + [random_point(rng, deco.rank, unitary=i % 2 == 0) for i in range(50)]
    for p in pts:
        assert nz(s.predict(p)) == nz(rank_at_point(C, p))


# ------------------------------------------------------------ real line

def test_real_line_examples():
    assert real_line_exceptional_set(line("z - 1"), [1]).exceptional == [0]
    assert real_line_exceptional_set(line("z - T"), [1]).exceptional == [1]
    assert real_line_exceptional_set(line("3"), [1]).exceptional == []


def test_real_line_all_minors_zero():
    C = line("z1 - z2", n=2)
    with pytest.raises(AllMinorsZero):
        real_line_exceptional_set(C, [1, 1])


@pytest.mark.parametrize("entry,alpha", [("z1 - T*z2", [1, 2]), ("z1^2 - 2*T^(1/2)*z1 + T", [1, 0]),
                                         ("z1*z2 - T^3", [Fraction(1, 2), 1])])
def test_real_line_against_grid_scan(entry, alpha):
    C = line(entry, n=2)
    rep = real_line_exceptional_set(C, alpha)
    generic = nz(rep.generic_cohomology)
    grid = [Fraction(k, 10) for k in range(-50, 51)] + list(rep.exceptional)
    flagged = {t for t in grid if nz(rank_at_point(C, line_point(alpha, t))) != generic}
    assert flagged == set(rep.exceptional)


# ------------------------------------------------------------ exactness

def test_exactness_examples():
    C = line("z - 1")
    loc = exactness_locus(C, {"b": "1"})
    assert not loc.contains(pt(ONE)) and loc.contains(pt(ONE * 2))
    assert exactness_locus(C, {}).contains(pt(ONE))
    boundary = exactness_locus(C, {"b": parse_laurent("z - 1", 1)})
    assert boundary.contains(pt(ONE)) and boundary.contains(pt(T(1)))


def test_exactness_requires_cocycle():
    C = line("z - 1")
    with pytest.raises(NotCocycle):
        exactness_locus(C, {"a": "1"})


def test_exactness_locus_agrees_with_solving():
    C = complex_of([("a", "c", "z1 - 1"), ("b", "c", "z2 - T"), ("a", "d", "z2 - T"), ("b", "d", "1 - z1")],
                   {"a": 0, "b": 0, "c": 1, "d": 1}, n=2)
    loc = exactness_locus(C, {"c": "1"})
    rng = random.Random(2)
    pts = [pt(ONE, T(1)), pt(ONE, ONE)] + [random_point(rng, 2, unitary=i % 3 == 0) for i in range(25)]
    for p in pts:
        assert loc.contains(p) == loc.contains_by_solve(p) == loc.contains_by_rank(p)
    assert not loc.contains(pt(ONE, T(1)))


# ------------------------------------------------------------ stabilizer

def test_stabilizer_of_factor_circle():
    cat, deco = build_fixture("torus")
    rep = stabilizer_locus(build_local_system_family(cat, deco), "L1", [(0, 1)], samples=10)
    assert rep.passed
    assert len(rep.subtorus_points) == 10 and len(rep.off_points) == 10


def test_stabilizer_rejects_wrong_kernel():
    cat, deco = build_fixture("torus")
    rep = stabilizer_locus(build_local_system_family(cat, deco), "L1", [(1, 0)], samples=10)
    assert not rep.passed


def test_stabilizer_with_zero_decoration_is_everything():
    cat, _ = build_fixture("circle")
    rep = stabilizer_locus(build_local_system_family(cat, Decoration(1)), "L", [(1,)], samples=10)
    assert rep.passed and not rep.off_points


def test_stabilizer_of_the_circle_is_trivial():
    cat, deco = build_fixture("circle")
    rep = stabilizer_locus(build_local_system_family(cat, deco), "L", [], samples=10)
    assert rep.passed
    assert rep.contains(TorusPoint.identity(1))


def test_stabilizer_needs_unit():
    cat, deco = build_fixture("circle")
    fam = build_local_system_family(cat, deco)
    cat.units.pop("L")
    with pytest.raises(UnitNotDesignated):
        stabilizer_locus(fam, "L", [(1,)])


# ------------------------------------------------------------ files

def test_complex_round_trip():
    C = complex_of([("a", "b", "z1 - T*z2^-1")], {"a": 0, "b": 1}, n=2)
    D = complex_from_dict(complex_to_dict(C))
    assert complex_to_dict(D) == complex_to_dict(C)


def test_complex_validation():
    with pytest.raises(ValidationError):
        complex_of([("a", "b", "z")], {"a": 0, "b": 2})
    with pytest.raises(ValidationError):
        complex_of([("a", "b", "1"), ("b", "c", "1")], {"a": 0, "b": 1, "c": 2})
    with pytest.raises(ValidationError):
        complex_of([("a", "q", "1")], {"a": 0})
