import pytest

from floerfam.ainf_core import AInfCategory, Generator, UnknownObject
from floerfam.ainf_modules import (ModGen, NotClosed, build_yoneda, check_module_relations, cone, diagonal,
                                   explicit_module, identity_morphism, is_closed, modules_equal, right_yoneda,
                                   scalar_morphism, shift, specialize, tabulate, zero_morphism, ModuleMorphism)
from floerfam.bar_convolution import module_complex
from floerfam.family_engine import build_local_system_family
from floerfam.fixtures import build_fixture
from floerfam.novikov import NovikovScalar
from floerfam.torus_ring import TorusPoint

ONE = NovikovScalar.one()
T = NovikovScalar.T


def novikov_field():
    cat = AInfCategory(["X"], [Generator("u", "X", "X", 0)], "z", {"X": "u"}, "Lambda")
    cat.add_mu(("u", "u"), "u", ONE)
    return cat


def total_h(mod, source=None, target=None):
    return module_complex(mod, source, target).total_cohomology()


def test_right_yoneda_of_one_object_algebra_is_right_multiplication():
    cat, _ = build_fixture("circle")
    h = build_yoneda(cat, ("right", "L"))
    assert set(h.gens) == {"1", "e"}
    assert h.act([], "e", ["1"]) == cat.mu(("e", "1"))


def test_diagonal_structure_constants():
    cat, _ = build_fixture("circle")
    dg = build_yoneda(cat, "diagonal")
    assert dg.act(["e"], "1", ["e"]) == {}
    assert dg.act([], "e", ["e"]) == cat.mu(("e", "e"))


def test_yoneda_bimodule_value_spaces():
    cat, _ = build_fixture("torus")
    y = build_yoneda(cat, ("bimodule", "L1", "L2"))
    # value at (A, B) = hom(L1, A) (x) hom(B, L2)
    expected = {(a, b) for a in ("1a", "ea") for b in ("1b", "eb")}
    assert set(y.gens) == expected
    assert {(g.source, g.target) for g in y.gens.values()} == {("L2", "L1")}


def test_unknown_object():
    cat, _ = build_fixture("circle")
    with pytest.raises(UnknownObject):
        right_yoneda(cat, "nowhere")


@pytest.mark.parametrize("name", ["circle", "torus", "random"])
def test_yoneda_outputs_satisfy_module_relations(name):
    cat, _ = build_fixture(name)
    assert check_module_relations(diagonal(cat), 4).passed
    for obj in cat.objects:
        assert check_module_relations(build_yoneda(cat, ("right", obj)), 4).passed
        assert check_module_relations(build_yoneda(cat, ("left", obj)), 4).passed
        for obj2 in cat.objects:
            assert check_module_relations(build_yoneda(cat, ("bimodule", obj, obj2)), 4).passed


def test_corrupted_tensor_entry_is_detected():
    cat, _ = build_fixture("circle")
    dg = diagonal(cat)
    table = tabulate(dg, 3)
    key = ((), "e", ("1",))
    table[key] = {y: -c for y, c in table[key].items()}
    bad = explicit_module("bimodule", cat, dg.gens.values(), table)
    rep = check_module_relations(bad, 3)
    assert not rep.passed
    assert any("e" in f.string for f in rep.failures)


def test_cone_of_identity_is_acyclic():
    cat, _ = build_fixture("circle")
    h = right_yoneda(cat, "L")
    c = cone(identity_morphism(h))
    assert total_h(c) == 0


def test_cone_of_zero_map_is_a_sum():
    cat, _ = build_fixture("torus")
    h = right_yoneda(cat, "L1")
    c = cone(zero_morphism(shift(h), h))
    assert total_h(c) == 2 * total_h(h)


def test_cone_of_multiplication_by_T_is_acyclic():
    cat = novikov_field()
    h = right_yoneda(cat, "X")
    assert total_h(h) == 1
    assert total_h(cone(scalar_morphism(h, T()))) == 0


def test_cone_refuses_non_closed_map():
    cat, _ = build_fixture("circle")
    h = right_yoneda(cat, "L")
    f = ModuleMorphism(shift(h), h, lambda l, m, r: {"1": ONE} if (m == "e" and not l and not r) else {})
    assert not is_closed(f)
    with pytest.raises(NotClosed):
        cone(f)


def test_specialize_family_at_identity_is_diagonal():
    cat, deco = build_fixture("torus")
    fam = build_local_system_family(cat, deco)
    assert modules_equal(specialize(fam.module, TorusPoint.identity(2)), diagonal(cat), 4)


def test_specialize_carries_cutoff():
    cat, deco = build_fixture("circle")
    fam = build_local_system_family(cat, deco)
    p = TorusPoint((NovikovScalar([(0, 2)], cutoff=3),))
    m = specialize(fam.module, p)
    coeffs = [c for out in tabulate(m, 2).values() for c in out.values()]
    assert any(c.cutoff == 3 for c in coeffs)


@pytest.mark.parametrize("name", ["circle", "torus"])
def test_specialize_commutes_with_cone(name):
    cat, deco = build_fixture(name)
    fam = build_local_system_family(cat, deco)
    p = TorusPoint.of(*([T(1)] + [NovikovScalar.monomial(-2)] * (deco.rank - 1)))
    a = specialize(cone(identity_morphism(fam.module), None), p)
    b = cone(identity_morphism(specialize(fam.module, p)), None)
    assert modules_equal(a, b, 3)
