"""The ten acceptance criteria as functions returning deterministic reports.

Each criterion returns a ``CriterionResult``; ``report`` holds only
seed-determined content so that re-runs can be compared byte for byte.
Wall-clock time is kept apart in ``seconds``.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List

from . import affinoid_domains as aff
from . import family_engine as fe
from . import sheaf_analysis as sa
from .ainf_core import check_ainf_relations
from .ainf_modules import diagonal, modules_equal
from .complexes import FiniteComplex
from .fixtures import build_fixture
from .novikov import GaussianRational, NovikovScalar
from .torus_ring import LaurentElement, TorusPoint, brute_force_zeros, eval_at_point, exp_poly_zeros


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    report: Dict
    seconds: float = 0.0

    def line(self) -> str:
        return f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'}  {self.title}"

    def dumps(self) -> str:
        return json.dumps({"criterion": self.number, "passed": self.passed, "report": self.report},
                          sort_keys=True, indent=1)


@dataclass
class AcceptanceConfig:
    seed: int = 0
    identities: int = 1000
    identity_seconds: float = 10.0
    points: int = 10
    truncation: int = 2
    pairs: int = 25
    stratify_points: int = 50
    polys: int = 200
    zeros_seconds: float = 30.0
    stabilizer_points: int = 20
    grid: int = 100
    validate_points: int = 20
    fixtures: List[str] = field(default_factory=lambda: ["circle", "torus"])


# ------------------------------------------------------------ 1

def _random_scalar(rng: random.Random, nonzero: bool = True) -> NovikovScalar:
    terms = []
    for _ in range(rng.randint(1, 3)):
        e = Fraction(rng.randint(-6, 6), rng.choice([1, 2, 3]))
        re = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        im = Fraction(rng.randint(-2, 2), rng.randint(1, 3)) if rng.random() < 0.2 else 0
        terms.append((e, GaussianRational(re, im)))
    a = NovikovScalar(terms)
    if nonzero and a.is_zero():
        return NovikovScalar.monomial(1, 0)
    return a


def criterion_1(cfg: AcceptanceConfig) -> CriterionResult:
    rng = random.Random(cfg.seed)
    counts = {"associativity": 0, "distributivity": 0, "inverse": 0, "valuation": 0}
    failures = []
    t0 = time.perf_counter()
    kinds = list(counts)
    for i in range(cfg.identities):
        kind = kinds[i % 4]
        a, b, c = _random_scalar(rng), _random_scalar(rng), _random_scalar(rng)
        if kind == "associativity":
            ok = (a * b) * c == a * (b * c) and (a + b) + c == a + (b + c)
        elif kind == "distributivity":
            ok = a * (b + c) == a * b + a * c
        elif kind == "inverse":
            cut = Fraction(rng.randint(1, 8), rng.choice([1, 2]))
            inv = a.invert(cutoff=-a.val + cut)
            prod = a * inv
            ok = prod.agrees_with(NovikovScalar.one()) and (prod.is_exact() or prod.cutoff >= cut)
        else:
            ok = (a * b).val == a.val + b.val
        counts[kind] += 1
        if not ok:
            failures.append({"kind": kind, "a": str(a), "b": str(b), "c": str(c)})
    secs = time.perf_counter() - t0
    report = {"counts": counts, "failures": failures[:5], "failure_count": len(failures)}
    return CriterionResult(1, "Novikov/Laurent identities", not failures and secs < cfg.identity_seconds,
                           report, secs)


# ------------------------------------------------------------ 2

def criterion_2(cfg: AcceptanceConfig) -> CriterionResult:
    rep = {}
    ok = True
    for name in ("circle", "torus"):
        cat, _ = build_fixture(name)
        r = check_ainf_relations(cat, 6)
        rep[name] = {"passed": r.passed, "checked": r.checked}
        ok = ok and r.passed
    bad, _ = build_fixture("corrupted-sign")
    r = check_ainf_relations(bad, 6)
    rep["corrupted-sign"] = {"passed": r.passed, "failure_lengths": r.failure_lengths}
    ok = ok and not r.passed and r.failure_lengths == [3]
    return CriterionResult(2, "A-infinity relations to length 6", ok, rep)


# ------------------------------------------------------------ 3, 4, 5

def _families(cfg):
    for name in cfg.fixtures:
        cat, deco = build_fixture(name, cfg.seed)
        yield name, fe.build_local_system_family(cat, deco)


def _stable_zero(r) -> bool:
    return r.acyclic and all(r.stable_total(N) == 0 for N in range(r.n0, r.n_max + 1))


def criterion_3(cfg: AcceptanceConfig) -> CriterionResult:
    rep, ok = {}, True
    for name, fam in _families(cfg):
        per = {}
        for p in fe.seeded_points(fam.rank, cfg.points, cfg.seed):
            reps = fe.collapse_reports(fam, p, cfg.truncation)
            per[str(p)] = {k: {"n0": r.n0, "stable_cone_rank": r.stable_total(cfg.truncation)}
                           for k, r in sorted(reps.items())}
            ok = ok and all(_stable_zero(r) for r in reps.values())
        rep[name] = per
    return CriterionResult(3, "collapse cones acyclic past stabilization", ok, rep)


def criterion_4(cfg: AcceptanceConfig) -> CriterionResult:
    rep, ok = {}, True
    for name, fam in _families(cfg):
        ident = modules_equal(fe.restrict_family(fam, TorusPoint.identity(fam.rank)), diagonal(fam.cat), 4)
        per = {}
        for obj in fam.cat.objects:
            h = fe.build_decorated_yoneda_family(fam.cat, obj, fam.decoration)
            for p in fe.seeded_points(fam.rank, cfg.points, cfg.seed):
                r = fe.action_cone_report(h, fam, p, cfg.truncation)
                per[f"{obj} {p}"] = {"n0": r.n0, "stable_cone_rank": r.stable_total(cfg.truncation)}
                ok = ok and _stable_zero(r)
        rep[name] = {"identity_is_diagonal": ident, "action": per}
        ok = ok and ident
    return CriterionResult(4, "action map quasi-isomorphism and M|1 = diagonal", ok, rep)


def criterion_5(cfg: AcceptanceConfig) -> CriterionResult:
    rep, ok = {}, True
    for name, fam in _families(cfg):
        g = fe.grouplike_check(fam, fe.seeded_pairs(fam.rank, cfg.pairs, cfg.seed), N=1)
        rep[name] = g.as_dict()
        ok = ok and g.passed and len(g.pairs) == cfg.pairs
    return CriterionResult(5, "group-like check", ok, rep)


# ------------------------------------------------------------ 6

def criterion_6(cfg: AcceptanceConfig) -> CriterionResult:
    cat, deco = build_fixture("torus")
    fam = fe.build_local_system_family(cat, deco)
    C = sa.floer_sheaf(fam, "L1", "L1")
    strat = sa.rank_stratification(C, 2, seed=cfg.seed)
    strata = [(s["cohomology"], s["locus"]) for s in strat.strata()]
    generic = sum(strat.generic_cohomology().values())
    one = TorusPoint.identity(2)
    jump_ok = False
    for coh, loc in strata:
        if sum(coh.values()) == 2:
            # the jump locus is z1 = 1: it holds at (1, w) and fails at (w, 1) for w != 1
            w = NovikovScalar.monomial(Fraction(3, 2), 1)
            jump_ok = loc.contains(TorusPoint((one.coords[0], w))) and not loc.contains(TorusPoint((w, one.coords[1])))
    shape = sorted(sum(c.values()) for c, _ in strata)
    rng = random.Random(cfg.seed)
    pts = strat.candidate_points(rng, 3)[:cfg.stratify_points // 5]
    while len(pts) < cfg.stratify_points:
        pts.append(sa.random_point(rng, 2, unitary=len(pts) % 2 == 0))
    agree = {}
    for p in pts:
        agree[str(p)] = strat.predict(p) == sa.rank_at_point(C, p)
    hits = sum(1 for p in pts if sum(sa.rank_at_point(C, p).values()) == 2)
    ok = generic == 0 and shape == [0, 2] and jump_ok and all(agree.values()) and hits > 0
    rep = {"generic_rank": generic, "strata_ranks": shape, "jump_locus_is_z1_eq_1": jump_ok,
           "jump_points_sampled": hits, "agreement": agree}
    return CriterionResult(6, "torus Floer sheaf stratification", ok, rep)


# ------------------------------------------------------------ 7

def random_exp_poly(rng: random.Random) -> LaurentElement:
    """At most 6 terms, rational exponents in [-3, 3]; half are built to have zeros."""
    def exp():
        return Fraction(rng.randint(-9, 9), 3)

    if rng.random() < 0.5:
        # (z^a - T^{s}) (c z^b + d T^u)-type products have rational zeros
        a, s = Fraction(rng.choice([1, 2, 3]), rng.choice([1, 2])), exp()
        f = LaurentElement.monomial((a,), 1, 1, real=True) - LaurentElement.monomial((0,), NovikovScalar.T(s), 1, real=True)
        g = LaurentElement.zero(1, real=True)
        for _ in range(rng.randint(1, 2)):
            g = g + LaurentElement.monomial((exp() / 2,), NovikovScalar.monomial(rng.choice([-2, -1, 1, 3]), exp() / 2),
                                            1, real=True)
        out = f * g
        if not out.is_zero() and len(out.terms) <= 6 and all(-3 <= v[0] <= 3 for v in out.terms):
            return out
    f = LaurentElement.zero(1, real=True)
    while f.is_zero():
        for _ in range(rng.randint(1, 6)):
            f = f + LaurentElement.monomial((exp(),), NovikovScalar.monomial(rng.choice([-3, -1, 1, 2]), exp()),
                                            1, real=True)
    return f


def criterion_7(cfg: AcceptanceConfig) -> CriterionResult:
    rng = random.Random(cfg.seed)
    mismatches, with_zeros = [], 0
    t0 = time.perf_counter()
    for _ in range(cfg.polys):
        f = random_exp_poly(rng)
        got = exp_poly_zeros(f).zeros
        want = brute_force_zeros(f)
        with_zeros += bool(want)
        if tuple(got) != tuple(want):
            mismatches.append({"f": str(f), "got": [str(t) for t in got], "oracle": [str(t) for t in want]})
    secs = time.perf_counter() - t0
    rep = {"polys": cfg.polys, "with_zeros": with_zeros, "mismatches": mismatches}
    return CriterionResult(7, "exponential polynomial zeros", not mismatches and secs < cfg.zeros_seconds, rep, secs)


# ------------------------------------------------------------ 8

def criterion_8(cfg: AcceptanceConfig) -> CriterionResult:
    cat, deco = build_fixture("torus")
    fam = fe.build_local_system_family(cat, deco)
    r = sa.stabilizer_locus(fam, "L1", [(0, 1)], cfg.stabilizer_points, cfg.seed)
    inside = sum(1 for _, b in r.subtorus_points if b)
    outside = sum(1 for _, b in r.off_points if not b)
    ok = r.passed and inside == cfg.stabilizer_points and outside == cfg.stabilizer_points
    rep = {"subtorus_in_locus": inside, "off_torus_outside": outside,
           "subtorus_points": [str(p) for p, _ in r.subtorus_points],
           "off_points": [str(p) for p, _ in r.off_points]}
    return CriterionResult(8, "stabilizer of a factor circle", ok, rep)


# ------------------------------------------------------------ 9

def _grid(P: aff.Polytope, count: int) -> List[tuple]:
    vs = P.vertices()
    lo = [min(v[i] for v in vs) for i in range(P.n)]
    hi = [max(v[i] for v in vs) for i in range(P.n)]
    side = max(2, round(count ** (1 / P.n)))
    pts = []
    if P.n == 1:
        pts = [(lo[0] + (hi[0] - lo[0]) * Fraction(k, count - 1),) for k in range(count)]
    else:
        for a in range(side):
            for b in range(side):
                pts.append((lo[0] + (hi[0] - lo[0]) * Fraction(a, side - 1),
                            lo[1] + (hi[1] - lo[1]) * Fraction(b, side - 1)))
    return [p for p in pts if P.contains(p)]


def _abs_exponent(f: LaurentElement, nu, unit) -> Fraction:
    # |f(x)| = e^{-val f(x)}: an independent evaluation at an actual point
    return eval_at_point(f, aff.point_over(nu, unit)).val


def sup_norm_cases():
    from .torus_ring import parse_laurent
    tri = aff.Polytope([((-1, 0), 1), ((0, -1), 1), ((1, 1), 1)])
    return [
        (parse_laurent("T", 1), aff.Polytope.box([-1], [1])),
        (parse_laurent("z1", 1), aff.Polytope.box([-1], [1])),
        (parse_laurent("1 + T*z1", 1), aff.Polytope.box([0], [1])),
        (parse_laurent("z1 - T + T**2*z1**-2", 1), aff.Polytope.box([-2], [3])),
        (parse_laurent("z1*z2 + T*z1**-1 + 2", 2), aff.Polytope.box([-1, -1], [2, 1])),
        (parse_laurent("T**(1/2)*z1 - z2**2 + T**3", 2), tri),
    ]


def semicontinuity_cases():
    def cx(entries, basis):
        return sa.complex_from_dict({"ring_rank": 1, "basis": [{"id": b, "degree": d} for b, d in basis],
                                     "d": [{"from": a, "to": b, "entry": e} for a, b, e in entries]})
    return {
        "1+Tz": (cx([("a", "b", "1+T*z1")], [("a", 0), ("b", 1)]), aff.Polytope.box([Fraction(-1, 2)], [Fraction(1, 2)])),
        "diag(1+Tz, 2+T^2z)": (cx([("a", "c", "1+T*z1"), ("b", "d", "2+T**2*z1")],
                                  [("a", 0), ("b", 0), ("c", 1), ("d", 1)]), aff.Polytope.box([-3], [3])),
        "z-1": (cx([("a", "b", "z1-1")], [("a", 0), ("b", 1)]), aff.Polytope.box([Fraction(-1, 2)], [Fraction(1, 2)])),
    }


def criterion_9(cfg: AcceptanceConfig) -> CriterionResult:
    rng = random.Random(cfg.seed)
    norm_rep, ok = [], True
    for f, P in sup_norm_cases():
        res = aff.sup_norm_over_polytope(f, P)
        grid = _grid(P, cfg.grid)
        worst = None
        for nu in grid:
            unit = [Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2])) for _ in range(P.n)]
            q = _abs_exponent(f, nu, unit)
            worst = q if worst is None else min(worst, q)
            ok = ok and q >= res.exponent
        attained = _abs_exponent(f, res.vertex, [Fraction(7, 5)] * P.n) == res.exponent
        ok = ok and attained
        norm_rep.append({"f": str(f), "exponent": str(res.exponent), "vertex": [str(x) for x in res.vertex],
                         "grid_points": len(grid), "grid_min_exponent": str(worst), "attained_at_vertex": attained})
    semi_rep = {}
    refused = []
    for name, (C, P) in semicontinuity_cases().items():
        try:
            res = aff.semicontinuity_shrink(C, P, 20, cfg.seed, include_identity=False,
                                            validate=cfg.validate_points)
            semi_rep[name] = {"delta": str(res.delta), "validated": res.validated,
                              "validation_points": len(res.validation)}
            ok = ok and res.validated and len(res.validation) == cfg.validate_points
        except aff.TiedLeadingTerms as exc:
            refused.append(name)
            semi_rep[name] = {"refused": str(exc)}
    ok = ok and refused == ["z-1"]
    return CriterionResult(9, "affinoid toolkit", ok, {"sup_norm": norm_rep, "semicontinuity": semi_rep,
                                                       "refused": refused})


# ------------------------------------------------------------ 10

CRITERIA: Dict[int, Callable[[AcceptanceConfig], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9,
}


def criterion_10(cfg: AcceptanceConfig, first: Dict[int, CriterionResult]) -> CriterionResult:
    """Re-run every criterion with the same seed and compare the serialized reports."""
    same = {}
    for k, fn in CRITERIA.items():
        again = fn(cfg)
        same[str(k)] = again.dumps() == first[k].dumps()
    return CriterionResult(10, "byte-identical re-run", all(same.values()), {"identical": same})


def run_all(cfg: AcceptanceConfig = AcceptanceConfig()) -> List[CriterionResult]:
    results = {}
    for k, fn in CRITERIA.items():
        t0 = time.perf_counter()
        r = fn(cfg)
        if not r.seconds:
            r.seconds = time.perf_counter() - t0
        results[k] = r
    t0 = time.perf_counter()
    results[10] = criterion_10(cfg, results)
    results[10].seconds = time.perf_counter() - t0
    return [results[k] for k in sorted(results)]
