import itertools

import pytest

from floerfam.ainf_modules import (IncompatibleKinds, ModuleLike, diagonal, left_yoneda, right_yoneda,
                                   yoneda_bimodule, is_closed)
from floerfam.bar_convolution import (Convolution, StrictFunctor, WrongShape, collapse_diagonal, collapse_yoneda_hom,
                                      contract_middle, convolve, graph_bimodule_compose, induced_cohomology_rank,
                                      morphism_complexes, stable_cone_ranks)
from floerfam.complexes import stable_cohomology, total
from floerfam.fixtures import build_fixture
from floerfam.linalg import rank


def stable_h(fs, N):
    big = Convolution(fs, N + 1)
    C = big.complex()
    return stable_cohomology(C, {b for b in C.basis if big.mid_length(b) <= N})


@pytest.mark.parametrize("name", ["circle", "torus"])
def test_diagonal_collapse_is_quasi_iso(name):
    cat, _ = build_fixture(name)
    rep = stable_cone_ranks(lambda N: collapse_diagonal(Convolution([diagonal(cat), diagonal(cat)], N)), 2)
    assert rep.is_complex and rep.acyclic


@pytest.mark.parametrize("name", ["circle", "torus"])
def test_yoneda_collapse_is_quasi_iso(name):
    cat, _ = build_fixture(name)
    for a in cat.objects:
        for b in cat.objects:
            rep = stable_cone_ranks(
                lambda N: collapse_yoneda_hom(Convolution([right_yoneda(cat, b), left_yoneda(cat, a)], N)), 2)
            assert rep.acyclic, (a, b, rep.as_dict())


def test_collapse_maps_are_closed():
    cat, _ = build_fixture("circle")
    f = collapse_diagonal(Convolution([diagonal(cat), diagonal(cat)], 2))
    assert is_closed(f, 3)


def test_stable_ranks_are_reported_per_truncation():
    cat, _ = build_fixture("circle")
    rep = stable_cone_ranks(lambda N: collapse_diagonal(Convolution([diagonal(cat), diagonal(cat)], N)), 2)
    assert sorted(rep.ranks) == [0, 1, 2]
    assert all(total(r) == 0 for r in rep.ranks.values())
    assert rep.n0 == 0
    d = rep.as_dict()
    assert d["acyclic"] and d["stable_cone_rank"] == {"0": 0, "1": 0, "2": 0}


def test_raw_truncation_is_not_stable():
    # the raw truncated complex has classes at the cut; the stable part does not
    cat, _ = build_fixture("circle")
    fs = [right_yoneda(cat, "L"), left_yoneda(cat, "L")]
    raw = Convolution(fs, 2).complex().total_cohomology()
    assert raw > total(stable_h(fs, 2)) == 2


def test_kind_table():
    cat, _ = build_fixture("torus")
    r, l, b = right_yoneda(cat, "L1"), left_yoneda(cat, "L1"), diagonal(cat)
    assert convolve(r, l, 1).kind == "complex"
    assert convolve(r, b, 1).kind == "right"
    assert convolve(b, l, 1).kind == "left"
    assert convolve(b, b, 1).kind == "bimodule"
    with pytest.raises(IncompatibleKinds):
        convolve(l, r, 1)
    with pytest.raises(IncompatibleKinds):
        Convolution([r, l, l], 1)


def test_convolution_with_zero_module_is_zero():
    cat, _ = build_fixture("circle")
    zero = ModuleLike("bimodule", cat, [], lambda l, m, r: {}, "0")
    assert convolve(zero, diagonal(cat), 2).complex().dim == 0


def test_yoneda_collapse_refuses_middle_factor():
    cat, _ = build_fixture("circle")
    conv = Convolution([right_yoneda(cat, "L"), diagonal(cat), left_yoneda(cat, "L")], 1)
    with pytest.raises(WrongShape):
        collapse_yoneda_hom(conv)


def composition_rank(cat, a, b, c):
    """Rank of mu^2: hom(b, c) (x) hom(a, b) -> hom(a, c) on fixtures with mu^1 = 0."""
    rows = {}
    for x in cat.homs[(a, b)]:
        assert not cat.mu((x,))
        for y in cat.homs[(b, c)]:
            rows[(y, x)] = dict(cat.mu((y, x)))
    return rank(rows)


def contract_middle_rank(cat, a, b, c, N):
    f = contract_middle(Convolution([right_yoneda(cat, c), yoneda_bimodule(cat, b, b), left_yoneda(cat, a)], N + 1))
    src, tgt, _ = morphism_complexes(f)
    s = src.restrict({x for x in src.basis if f.src.mid_length(x) <= N})
    fmap = {x: dict(f.apply((), x, ())) for x in s.basis}
    return induced_cohomology_rank(s, tgt, fmap)


@pytest.mark.parametrize("name", ["circle", "torus"])
def test_contract_middle_induces_composition(name):
    # stable part of the source into the target: its rank is that of mu^2 on cohomology
    cat, _ = build_fixture(name)
    for a, b, c in itertools.product(cat.objects, repeat=3):
        want = composition_rank(cat, a, b, c)
        assert contract_middle_rank(cat, a, b, c, 1) == want
        assert contract_middle_rank(cat, a, b, c, 2) == want


def test_contract_middle_shape():
    cat, _ = build_fixture("circle")
    with pytest.raises(WrongShape):
        contract_middle(Convolution([right_yoneda(cat, "L"), left_yoneda(cat, "L")], 1))


def test_identity_graph_composition():
    cat, _ = build_fixture("circle")
    idf = StrictFunctor.identity()
    rep = stable_cone_ranks(lambda N: graph_bimodule_compose(cat, idf, idf, N)[1], 1)
    assert rep.acyclic
