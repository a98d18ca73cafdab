import json

import pytest
from hypothesis import given, settings, strategies as st

from floerfam.ainf_core import (AInfCategory, Generator, NoUnitsDesignated, NonComposable, ValidationError,
                                check_ainf_relations, check_units, dumps_category, loads_category)
from floerfam.fixtures import build_fixture
from floerfam.novikov import NovikovScalar

ONE = NovikovScalar.one()


def exterior(grading="z"):
    gens = [Generator("1", "L", "L", 0), Generator("e", "L", "L", 1)]
    cat = AInfCategory(["L"], gens, grading, {"L": "1"}, "ext")
    cat.add_mu(("1", "1"), "1", ONE)
    cat.add_mu(("1", "e"), "e", -ONE)
    cat.add_mu(("e", "1"), "e", ONE)
    return cat


def test_apply_mu_examples():
    cat = exterior()
    assert cat.apply_mu(("e", "e")) == {}
    assert cat.apply_mu(("e", "1")) == {"e": ONE}
    deformed = exterior("z2")
    deformed.add_mu(("e", "e"), "1", NovikovScalar.T())
    assert deformed.apply_mu(("e", "e")) == {"1": NovikovScalar.T()}


def test_apply_mu_rejects_noncomposable():
    cat, _ = build_fixture("torus")
    with pytest.raises(NonComposable):
        cat.apply_mu(("ea", "eb"))


def test_exterior_algebra_passes():
    assert check_ainf_relations(exterior(), 5).passed
    assert check_units(exterior()).passed


def test_differential_squaring_to_nonzero_fails_at_length_one():
    gens = [Generator("a", "X", "X", 0), Generator("b", "X", "X", 1), Generator("c", "X", "X", 2)]
    cat = AInfCategory(["X"], gens)
    cat.add_mu(("a",), "b", ONE)
    cat.add_mu(("b",), "c", ONE)
    rep = check_ainf_relations(cat, 3)
    assert not rep.passed and 1 in rep.failure_lengths


def test_higher_product_with_unit_input_breaks_units():
    cat = exterior()
    cat.add_mu(("1", "e", "e"), "e", ONE)
    assert not check_units(cat).passed


def test_two_object_units_pass():
    cat, _ = build_fixture("torus")
    assert check_units(cat).passed
    rnd, _ = build_fixture("random", seed=4, size=4)
    assert check_units(rnd).passed


def test_units_required():
    with pytest.raises(NoUnitsDesignated):
        check_units(AInfCategory(["X"], [Generator("a", "X", "X", 0)]))


def test_corrupted_sign_fails_exactly_at_three():
    bad, _ = build_fixture("corrupted-sign")
    assert check_ainf_relations(bad, 2).passed
    assert check_ainf_relations(bad, 6).failure_lengths == [3]


def test_degree_mismatch_rejected():
    cat = exterior()
    with pytest.raises(ValidationError):
        cat.add_mu(("e", "e"), "1", ONE)


def test_json_round_trip_and_positioned_errors():
    cat, _ = build_fixture("circle")
    again = loads_category(dumps_category(cat))
    assert dumps_category(again) == dumps_category(cat)
    data = json.loads(dumps_category(cat))
    data["mu"][1]["coefficient"] = "T^^"
    with pytest.raises(ValidationError, match=r"mu\[1\]"):
        loads_category(json.dumps(data), "circle.json")


@given(st.integers(0, 50), st.integers(2, 4))
@settings(max_examples=15)
def test_random_fixtures_are_ainf(seed, size):
    cat, _ = build_fixture("random", seed, size)
    assert check_ainf_relations(cat, 4).passed


@given(st.data())
@settings(max_examples=10)
def test_any_sign_flip_in_the_circle_is_detected(data):
    cat, _ = build_fixture("circle")
    idx = data.draw(st.sampled_from([i for i, e in enumerate(cat.entries) if len(e.inputs) == 2]))
    bad = cat.replace_entry(idx, -cat.entries[idx].coefficient)
    assert not (check_ainf_relations(bad, 4).passed and check_units(bad).passed)
