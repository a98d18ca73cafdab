"""Finite complexes over the torus ring: pointwise ranks, minor stratifications,
real-line exceptional sets, exactness loci and stabilizers."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from . import linalg
from .ainf_core import AInfCategory
from .ainf_modules import left_yoneda, right_yoneda
from .bar_convolution import Convolution, collapse_yoneda_hom, module_complex
from .complexes import FiniteComplex, cone_complex
from .decoration import SymbolicCharacter
from .family_engine import FamilyBimodule
from .novikov import NovikovScalar, ZeroWithinPrecision
from .torus_ring import (LaurentElement, TorusPoint, eval_at_point, exp_poly_zeros,
                         real_line_substitute)

__all__ = ["AllMinorsZero", "NotCocycle", "UnitNotDesignated", "ConstructibleLocus", "BlockStrata",
           "Stratification", "floer_sheaf", "rank_at_point", "rank_stratification",
           "real_line_exceptional_set", "RealLineReport", "exactness_locus", "ExactnessLocus",
           "stabilizer_locus", "StabilizerReport", "laurent_complex", "random_point", "MINOR_CAP",
           "complex_from_dict", "complex_to_dict", "composition_cone", "line_point"]

MINOR_CAP = 12


class AllMinorsZero(ValueError):
    pass


class NotCocycle(ValueError):
    pass


class UnitNotDesignated(ValueError):
    pass


# ------------------------------------------------------------------ helpers

def _as_laurent(c, n: int) -> LaurentElement:
    if isinstance(c, LaurentElement):
        return c
    return LaurentElement.constant(c, n)


def laurent_complex(C: FiniteComplex, n: int) -> FiniteComplex:
    """Coerce every entry of C into the rank-n Laurent ring."""
    out = C.map_entries(lambda c: _as_laurent(c, n))
    out.ring_rank = n
    return out


def _is_zero_at(f: LaurentElement, p: TorusPoint) -> bool:
    v = eval_at_point(f, p)
    if v.is_zero():
        return True
    if not v.terms:
        raise ZeroWithinPrecision(f"value of {f} at {p} is below the cutoff")
    return False


def random_point(rng: random.Random, n: int, unitary: bool = False) -> TorusPoint:
    """A seeded torus point with small exact coordinates c T^e (c != 0)."""
    coords = []
    for _ in range(n):
        c = Fraction(1)
        while c == 1:
            c = Fraction(rng.choice([-3, -2, -1, 2, 3, 5]), rng.choice([1, 2, 3]))
        e = Fraction(0) if unitary else Fraction(rng.randint(-6, 6), rng.choice([1, 2, 3]))
        coords.append(NovikovScalar.monomial(c, e))
    return TorusPoint(tuple(coords))


def _block(C: FiniteComplex, k) -> Tuple[list, list, Dict]:
    """(rows, cols, entries) of d from degree k to k + 1; ``total`` means all of d."""
    if k == "total":
        cols = list(C.basis)
        rows = list(C.basis)
    else:
        cols = [b for b in C.basis if C.degrees[b] == k]
        rows = [b for b in C.basis if C.degrees[b] == k + 1]
    ent = {}
    for x in cols:
        for y, c in C.d.get(x, {}).items():
            ent[(y, x)] = c
    used_rows = {y for y, _ in ent}
    used_cols = {x for _, x in ent}
    return [r for r in rows if r in used_rows], [c for c in cols if c in used_cols], ent


def _minors(rows: list, cols: list, ent: Dict, size: int, n: int) -> List[Tuple[LaurentElement, tuple, tuple]]:
    zero, one = LaurentElement.zero(n), LaurentElement.one(n)
    if size == 0:
        return [(one, (), ())]
    out = []
    seen = set()
    for rs in itertools.combinations(rows, size):
        for cs in itertools.combinations(cols, size):
            mat = [[ent.get((r, c), zero) for c in cs] for r in rs]
            if any(all(v.is_zero() for v in row) for row in mat):
                continue
            det = linalg.determinant(mat, zero, one)
            if det.is_zero() or det in seen:
                continue
            seen.add(det)
            out.append((det, rs, cs))
    return out


# --------------------------------------------------------- constructible sets

@dataclass
class ConstructibleLocus:
    """Boolean formula over atoms "minor i vanishes".

    Formulas are nested tuples: ("true",), ("false",), ("atom", i),
    ("not", f), ("and", [f, ...]), ("or", [f, ...]).
    """
    n: int
    minors: List[LaurentElement] = field(default_factory=list)
    formula: tuple = ("true",)
    evidence: List[Tuple[TorusPoint, bool]] = field(default_factory=list)

    def atom(self, f: LaurentElement) -> tuple:
        for i, g in enumerate(self.minors):
            if g == f:
                return ("atom", i)
        self.minors.append(f)
        return ("atom", len(self.minors) - 1)

    def all_vanish(self, fs: Sequence[LaurentElement]) -> tuple:
        if not fs:
            return ("true",)
        return ("and", [self.atom(f) for f in fs])

    def contains(self, p: TorusPoint) -> bool:
        cache: Dict[int, bool] = {}

        def ev(f):
            tag = f[0]
            if tag == "true":
                return True
            if tag == "false":
                return False
            if tag == "atom":
                if f[1] not in cache:
                    cache[f[1]] = _is_zero_at(self.minors[f[1]], p)
                return cache[f[1]]
            if tag == "not":
                return not ev(f[1])
            if tag == "and":
                return all(ev(g) for g in f[1])
            if tag == "or":
                return any(ev(g) for g in f[1])
            raise ValueError(f"bad formula node {tag!r}")
        return ev(self.formula)

    def record(self, p: TorusPoint) -> bool:
        got = self.contains(p)
        self.evidence.append((p, got))
        return got

    def describe(self) -> str:
        def show(f):
            tag = f[0]
            if tag in ("true", "false"):
                return tag
            if tag == "atom":
                return f"[m{f[1]} = 0]"
            if tag == "not":
                return f"not {show(f[1])}"
            joiner = " and " if tag == "and" else " or "
            return "(" + joiner.join(show(g) for g in f[1]) + ")" if f[1] else ("true" if tag == "and" else "false")
        lines = [f"locus: {show(self.formula)}"]
        lines += [f"  m{i} = {m}" for i, m in enumerate(self.minors)]
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {"formula": _formula_json(self.formula), "minors": [str(m) for m in self.minors],
                "evidence": [{"point": str(p), "member": b} for p, b in self.evidence]}


def _formula_json(f):
    if f[0] in ("true", "false"):
        return f[0]
    if f[0] == "atom":
        return {"vanishes": f[1]}
    if f[0] == "not":
        return {"not": _formula_json(f[1])}
    return {f[0]: [_formula_json(g) for g in f[1]]}


def _and(*fs):
    return ("and", list(fs))


def _rank_equals(locus: ConstructibleLocus, ideals: Dict[int, list], j: int, top: int) -> tuple:
    """rank = j: some j-minor is nonzero and all (j+1)-minors vanish."""
    lower = ("not", locus.all_vanish(ideals[j])) if j > 0 else ("true",)
    upper = locus.all_vanish(ideals.get(j + 1, [])) if j < top else ("true",)
    return _and(lower, upper)


# ------------------------------------------------------------- floer sheaf

def floer_sheaf(fam: FamilyBimodule, L: str, L2: str) -> FiniteComplex:
    """𝔐(L, L') with its differential, entries in Λ[z^V]."""
    for obj in (L, L2):
        if obj not in fam.cat.objects:
            raise ValueError(f"unknown object {obj!r}")
    C = module_complex(fam.module, L, L2)
    C.name = f"M({L},{L2})"
    return laurent_complex(C, fam.rank)


def rank_at_point(C: FiniteComplex, p: TorusPoint) -> Dict:
    """Cohomology ranks of C at p: per degree, or {"total": r} for Z/2 gradings."""
    if C.is_laurent():
        return C.specialize(p).cohomology()
    return C.cohomology()


# ---------------------------------------------------------- stratification

@dataclass
class BlockStrata:
    degree: object
    rows: list
    cols: list
    generic_rank: int
    method: str
    ideals: Dict[int, List[LaurentElement]]
    certificate: Dict
    entries: Dict = field(repr=False, default_factory=dict)

    def rank_at(self, p: TorusPoint) -> int:
        if self.method == "minors":
            for j in range(self.generic_rank, 0, -1):
                if any(not _is_zero_at(f, p) for f in self.ideals[j]):
                    return j
            return 0
        mat: Dict = {}
        for (r, c), v in self.entries.items():
            val = eval_at_point(v, p)
            if val.terms or val.cutoff is not None:
                mat.setdefault(r, {})[c] = val
        return linalg.rank(mat)

    def at_least(self, j: int, n: int) -> ConstructibleLocus:
        loc = ConstructibleLocus(n)
        if self.method != "minors":
            raise ValueError("symbolic loci need the minor route (block exceeds the cap)")
        loc.formula = ("not", loc.all_vanish(self.ideals[j])) if j > 0 else ("true",)
        return loc


@dataclass
class Stratification:
    complex_name: str
    n: int
    grading: str
    dims: Dict
    blocks: List[BlockStrata]

    def _block(self, k) -> Optional[BlockStrata]:
        for b in self.blocks:
            if b.degree == k:
                return b
        return None

    def d_ranks_at(self, p: TorusPoint) -> Dict:
        return {b.degree: b.rank_at(p) for b in self.blocks}

    def cohomology_from_ranks(self, ranks: Dict) -> Dict:
        if self.grading == "z2":
            return {"total": self.dims["total"] - 2 * ranks.get("total", 0)}
        return {k: dim - ranks.get(k, 0) - ranks.get(k - 1, 0) for k, dim in self.dims.items()}

    def predict(self, p: TorusPoint) -> Dict:
        """Cohomology ranks at p read off from minor vanishing."""
        return self.cohomology_from_ranks(self.d_ranks_at(p))

    def generic_cohomology(self) -> Dict:
        return self.cohomology_from_ranks({b.degree: b.generic_rank for b in self.blocks})

    def thresholds(self) -> List[Tuple[object, int, ConstructibleLocus]]:
        out = []
        for b in self.blocks:
            if b.method != "minors":
                continue
            for j in range(1, b.generic_rank + 1):
                out.append((b.degree, j, b.at_least(j, self.n)))
        return out

    def strata(self, limit: int = 64) -> List[Dict]:
        """One entry per combination of differential ranks: predicted cohomology and locus."""
        blocks = [b for b in self.blocks if b.method == "minors"]
        out = []
        for combo in itertools.product(*[range(b.generic_rank, -1, -1) for b in blocks]):
            if len(out) >= limit:
                break
            loc = ConstructibleLocus(self.n)
            parts = [_rank_equals(loc, b.ideals, j, b.generic_rank) for b, j in zip(blocks, combo)]
            loc.formula = _and(*parts)
            ranks = {b.degree: j for b, j in zip(blocks, combo)}
            out.append({"d_ranks": ranks, "cohomology": self.cohomology_from_ranks(ranks), "locus": loc})
        return out

    def candidate_points(self, rng: random.Random, count: int = 4) -> List[TorusPoint]:
        """Points on coordinate binomial loci z_i^{+-1} = c found among the minors."""
        pts = []
        for b in self.blocks:
            for fs in b.ideals.values():
                for f in fs:
                    for i, val in _binomial_roots(f):
                        for _ in range(count):
                            base = list(random_point(rng, self.n).coords)
                            base[i] = val
                            pts.append(TorusPoint(tuple(base)))
        return pts

    def as_dict(self) -> dict:
        blocks = []
        for b in self.blocks:
            cert = {k: (str(v) if not isinstance(v, (list, tuple, int)) else [str(x) for x in v]
                        if isinstance(v, (list, tuple)) else v) for k, v in b.certificate.items()}
            blocks.append({"degree": str(b.degree), "generic_rank": b.generic_rank, "method": b.method,
                           "rows": len(b.rows), "cols": len(b.cols), "certificate": cert,
                           "ideals": {str(j): [str(f) for f in fs] for j, fs in sorted(b.ideals.items())}})
        strata = [{"d_ranks": {str(k): v for k, v in s["d_ranks"].items()},
                   "cohomology": {str(k): v for k, v in s["cohomology"].items()},
                   "locus": s["locus"].as_dict()} for s in self.strata()]
        return {"complex": self.complex_name, "grading": self.grading,
                "generic_cohomology": {str(k): v for k, v in self.generic_cohomology().items()},
                "blocks": blocks, "strata": strata}


def _binomial_roots(f: LaurentElement):
    """(i, value) with f vanishing on {z_i = value}, for f = a z^u + b z^{u +- e_i}."""
    if len(f.terms) != 2:
        return []
    (u, a), (w, b) = sorted(f.terms.items())
    diff = [x - y for x, y in zip(w, u)]
    nz = [i for i, x in enumerate(diff) if x]
    if len(nz) != 1 or abs(diff[nz[0]]) != 1:
        return []
    # a z^u + b z^w = 0  <=>  z^(w-u) = -a/b
    if not (a.is_exact() and b.is_exact()) or len(b.terms) != 1:
        return []
    val = -(a * b.invert())
    if diff[nz[0]] < 0:
        val = val.invert()
    return [(nz[0], val)]


def rank_stratification(C: FiniteComplex, n: Optional[int] = None, cap: int = MINOR_CAP,
                        seed: int = 0) -> Stratification:
    """Minor ideals of every block of d, with a certified generic rank."""
    n = n if n is not None else (C.ring_rank or 1)
    C = laurent_complex(C, n)
    rng = random.Random(seed)
    if C.grading == "z2":
        degrees = ["total"]
        dims = {"total": C.dim}
    else:
        degrees = C.degree_list()
        dims = {k: sum(1 for b in C.basis if C.degrees[b] == k) for k in degrees}
    blocks = []
    for k in degrees:
        rows, cols, ent = _block(C, k)
        if not ent:
            blocks.append(BlockStrata(k, rows, cols, 0, "minors", {0: [LaurentElement.one(n)]},
                                      {"minor": "1", "witness": str(TorusPoint.identity(n))}, ent))
            continue
        if len(cols) <= cap and len(rows) <= cap:
            ideals: Dict[int, list] = {}
            found = {}
            for j in range(0, min(len(rows), len(cols)) + 1):
                ms = _minors(rows, cols, ent, j, n)
                if not ms:
                    break
                ideals[j] = [m for m, _, _ in ms]
                found[j] = ms[0]
            r = max(ideals)
            det, rs, cs = found[r]
            witness = _witness(det, rng, n)
            cert = {"minor": str(det), "rows": [str(x) for x in rs], "cols": [str(x) for x in cs],
                    "witness": str(witness), "value": str(eval_at_point(det, witness))}
            blocks.append(BlockStrata(k, rows, cols, r, "minors", ideals, cert, ent))
        else:
            blocks.append(_randomized_block(k, rows, cols, ent, rng, n, cap))
    return Stratification(C.name, n, C.grading, dims, blocks)


def _witness(det: LaurentElement, rng: random.Random, n: int) -> TorusPoint:
    for _ in range(200):
        p = random_point(rng, n)
        if not _is_zero_at(det, p):
            return p
    raise AssertionError("no witness point found for a nonzero minor")


def _randomized_block(k, rows, cols, ent, rng, n, cap) -> BlockStrata:
    """Generic rank as the best rank over seeded points; the certificate is a pivot minor."""
    best, best_p, pivots = -1, None, None
    for _ in range(6):
        p = random_point(rng, n)
        mat: Dict = {}
        for (r, c), v in ent.items():
            val = eval_at_point(v, p)
            if not val.is_zero():
                mat.setdefault(r, {})[c] = val
        piv = linalg.row_reduce(mat)
        if len(piv) > best:
            best, best_p, pivots = len(piv), p, piv
    cert = {"witness": str(best_p), "rows": [str(r) for r, _ in pivots], "cols": [str(c) for _, c in pivots]}
    if best <= cap:
        zero, one = LaurentElement.zero(n), LaurentElement.one(n)
        mat = [[ent.get((r, c), zero) for _, c in pivots] for r, _ in pivots]
        det = linalg.determinant(mat, zero, one)
        cert["minor"] = str(det)
        cert["value"] = str(eval_at_point(det, best_p))
    return BlockStrata(k, rows, cols, best, "randomized", {}, cert, ent)


# ------------------------------------------------------------ real line

@dataclass
class RealLineReport:
    alpha: Tuple[Fraction, ...]
    generic_cohomology: Dict
    exceptional: List[Fraction]
    verified: Dict[Fraction, Dict]
    per_block: Dict

    def as_dict(self) -> dict:
        return {"alpha": [str(a) for a in self.alpha],
                "generic_cohomology": {str(k): v for k, v in self.generic_cohomology.items()},
                "exceptional": [str(t) for t in self.exceptional],
                "verified": {str(t): {str(k): v for k, v in r.items()} for t, r in self.verified.items()},
                "per_block": self.per_block}


def line_point(alpha: Sequence[Fraction], t: Fraction) -> TorusPoint:
    return TorusPoint(tuple(NovikovScalar.monomial(1, a * t) for a in alpha))


def real_line_exceptional_set(C: FiniteComplex, alpha: Sequence, n: Optional[int] = None,
                              cap: int = MINOR_CAP) -> RealLineReport:
    """The finitely many t at which the cohomology of C at z = T^{t alpha} jumps."""
    alpha = tuple(Fraction(a) for a in alpha)
    strat = rank_stratification(C, n if n is not None else len(alpha), cap)
    exceptional: set = set()
    per_block = {}
    for b in strat.blocks:
        if b.generic_rank == 0:
            continue
        if b.method != "minors":
            raise ValueError(f"block {b.degree} exceeds the minor cap {cap}")
        subs = [real_line_substitute(f, alpha) for f in b.ideals[b.generic_rank]]
        nonzero = [f for f in subs if not f.is_zero()]
        if not nonzero:
            raise AllMinorsZero(f"every {b.generic_rank}-minor of block {b.degree} vanishes on the line")
        common = None
        for f in nonzero:
            zs = set(exp_poly_zeros(f).zeros)
            common = zs if common is None else common & zs
            if not common:
                break
        common = common or set()
        per_block[str(b.degree)] = {"rank": b.generic_rank, "minors": len(nonzero),
                                    "zeros": [str(t) for t in sorted(common)]}
        exceptional |= common
    generic = strat.generic_cohomology()
    verified = {}
    for t in sorted(exceptional):
        verified[t] = rank_at_point(laurent_complex(C, len(alpha)), line_point(alpha, t))
    exc = [t for t in sorted(exceptional) if verified[t] != generic]
    return RealLineReport(alpha, generic, exc, verified, per_block)


# ----------------------------------------------------------- exactness

@dataclass
class ExactnessLocus:
    """Points where the cocycle s becomes exact: rank d0 = rank [d0, s]."""
    locus: ConstructibleLocus
    d0: Dict
    s: Dict
    n: int

    def contains(self, p: TorusPoint) -> bool:
        return self.locus.contains(p)

    def _at(self, p):
        mat: Dict = {}
        for (r, c), v in self.d0.items():
            val = eval_at_point(v, p)
            if not val.is_zero():
                mat.setdefault(r, {})[c] = val
        rhs = {r: eval_at_point(v, p) for r, v in self.s.items()}
        return mat, {r: v for r, v in rhs.items() if not v.is_zero()}

    def contains_by_rank(self, p: TorusPoint) -> bool:
        mat, rhs = self._at(p)
        aug = {r: dict(row) for r, row in mat.items()}
        for r, v in rhs.items():
            aug.setdefault(r, {})[("__s__",)] = v
        return linalg.rank(mat) == linalg.rank(aug)

    def contains_by_solve(self, p: TorusPoint) -> bool:
        mat, rhs = self._at(p)
        if not rhs:
            return True
        return linalg.solve(mat, rhs) is not None

    def as_dict(self) -> dict:
        return self.locus.as_dict()


def exactness_locus(C: FiniteComplex, s: Dict[Hashable, object], n: Optional[int] = None,
                    cap: int = MINOR_CAP) -> ExactnessLocus:
    n = n if n is not None else (C.ring_rank or 1)
    C = laurent_complex(C, n)
    s = {b: _as_laurent(v, n) for b, v in s.items() if not _as_laurent(v, n).is_zero()}
    for b in s:
        if b not in C.degrees:
            raise ValueError(f"{b!r} is not a basis element")
    ds: Dict = {}
    for x, v in s.items():
        for y, c in C.d.get(x, {}).items():
            ds[y] = ds[y] + v * c if y in ds else v * c
    if any(not v.is_zero() for v in ds.values()):
        raise NotCocycle("d(s) is not zero")
    loc = ConstructibleLocus(n)
    if not s:
        return ExactnessLocus(loc, {}, {}, n)
    degs = {C.degrees[b] for b in s}
    if len(degs) != 1:
        raise ValueError("s must be homogeneous")
    k = degs.pop()
    if C.grading == "z2":
        cols = list(C.basis)
    else:
        cols = [b for b in C.basis if C.degrees[b] == (k - 1)]
    ent = {}
    for x in cols:
        for y, c in C.d.get(x, {}).items():
            if y in C.degrees and (C.grading == "z2" or C.degrees[y] == k):
                ent[(y, x)] = c
    rows = sorted({y for y, _ in ent} | set(s), key=str)
    used = [c for c in cols if any((r, c) in ent for r in rows)]
    if len(used) + 1 > cap + 1 or len(rows) > cap + 1:
        raise ValueError("exactness locus exceeds the minor cap")
    aug = dict(ent)
    for r, v in s.items():
        aug[(r, "__s__")] = v
    top = min(len(rows), len(used))
    d_ideals = {j: [m for m, _, _ in _minors(rows, used, ent, j, n)] for j in range(0, top + 2)}
    a_ideals = {j: [m for m, _, _ in _minors(rows, used + ["__s__"], aug, j, n)]
                for j in range(0, min(len(rows), len(used) + 1) + 1)}
    options = []
    for j in range(0, top + 1):
        if j > 0 and not d_ideals[j]:
            break
        rank_j = _rank_equals(loc, d_ideals, j, top)
        options.append(_and(rank_j, loc.all_vanish(a_ideals.get(j + 1, []))))
    loc.formula = ("or", options)
    return ExactnessLocus(loc, ent, s, n)


# ---------------------------------------------------------- stabilizer

@dataclass
class StabilizerReport:
    obj: str
    kernel_lattice: List[Tuple[int, ...]]
    loci: List[ExactnessLocus]
    subtorus_points: List[Tuple[TorusPoint, bool]]
    off_points: List[Tuple[TorusPoint, bool]]

    def contains(self, p: TorusPoint) -> bool:
        return all(loc.contains(p) for loc in self.loci)

    @property
    def passed(self) -> bool:
        return all(b for _, b in self.subtorus_points) and not any(b for _, b in self.off_points)

    def as_dict(self) -> dict:
        return {"object": self.obj, "kernel_lattice": [list(v) for v in self.kernel_lattice],
                "passed": self.passed,
                "loci": [loc.as_dict() for loc in self.loci],
                "subtorus_points": [{"point": str(p), "member": b} for p, b in self.subtorus_points],
                "off_torus_points": [{"point": str(p), "member": b} for p, b in self.off_points]}


def composition_cone(fam: FamilyBimodule, L: str, inverse_first: bool = True) -> Tuple[FiniteComplex, Hashable]:
    """cone(mu^2 : 𝔐^-(L, L) (x) 𝔐(L, L) -> hom(L, L)) over Λ[z^V], and the unit's cone id.

    The first factor carries z^{-1} and the second z (swapped when
    ``inverse_first`` is False); the composite is untwisted.
    """
    cat: AInfCategory = fam.cat
    unit = cat.units.get(L)
    if unit is None:
        raise UnitNotDesignated(f"object {L!r} has no designated unit")
    z = SymbolicCharacter.generic(fam.rank)
    ja, jb = (z.inverse(), z) if inverse_first else (z, z.inverse())
    conv = Convolution([right_yoneda(cat, L, ja, fam.dcat), left_yoneda(cat, L, jb, fam.dcat)], 0)
    f = collapse_yoneda_hom(conv, fam.dcat)
    gens = [g for g in conv.basis() if cat.generators[g.id[0][1]].source == L]
    src = module_complex(conv, gens=gens)
    tgt = module_complex(f.tgt, L, L)
    fmap = {x: dict(f.apply((), x, ())) for x in src.basis}
    cone = cone_complex(src, tgt, fmap, 1, f"cone(mu2 at {L})")
    return laurent_complex(cone, fam.rank), ("tgt", unit)


def _kernel_complement(kernel: Sequence[Sequence[int]], n: int) -> List[List[int]]:
    rows = [[Fraction(x) for x in v] for v in kernel if any(v)]
    return [linalg.integer_scale(v) for v in linalg.rational_nullspace(rows, n)]


def _subtorus_point(rng: random.Random, kernel: Sequence[Sequence[int]], n: int) -> TorusPoint:
    coords = [NovikovScalar.one()] * n
    for v in kernel:
        t = random_point(rng, 1).coords[0]
        for i, k in enumerate(v):
            if k:
                coords[i] = coords[i] * (t ** int(k))
    return TorusPoint(tuple(coords))


def stabilizer_locus(fam: FamilyBimodule, L: str, kernel_lattice: Sequence[Sequence[int]],
                     samples: int = 20, seed: int = 0) -> StabilizerReport:
    """Unit-hitting loci of both compositions, checked against the subtorus of kernel_lattice."""
    n = fam.rank
    kernel = [tuple(int(x) for x in v) for v in kernel_lattice]
    for v in kernel:
        if len(v) != n:
            raise ValueError(f"kernel vector {v} has length {len(v)}, lattice rank is {n}")
    loci = []
    for inv in (True, False):
        cone, unit = composition_cone(fam, L, inv)
        loci.append(exactness_locus(cone, {unit: LaurentElement.one(n)}, n))
    rng = random.Random(seed)
    perp = _kernel_complement(kernel, n)
    inside, outside = [], []
    while len(inside) < samples:
        p = _subtorus_point(rng, kernel, n)
        inside.append((p, all(loc.contains(p) for loc in loci)))
    while perp and len(outside) < samples:
        p = random_point(rng, n, unitary=rng.random() < 0.5)
        if all(p.monomial(u) == 1 for u in perp):
            continue
        outside.append((p, all(loc.contains(p) for loc in loci)))
    return StabilizerReport(L, kernel, loci, inside, outside)


# ---------------------------------------------------------------- files

def complex_from_dict(data: dict, source: Optional[str] = None) -> FiniteComplex:
    """{"ring_rank": n, "grading": "z", "basis": [{"id", "degree"}], "d": [{"from", "to", "entry"}]}."""
    from .ainf_core import ValidationError
    from .torus_ring import parse_laurent
    where = f"{source}: " if source else ""
    try:
        n = int(data["ring_rank"])
        basis = [str(b["id"]) for b in data["basis"]]
        degrees = {str(b["id"]): int(b["degree"]) for b in data["basis"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{where}bad complex header: {exc}") from exc
    d: Dict = {}
    for i, e in enumerate(data.get("d", [])):
        try:
            x, y = str(e["from"]), str(e["to"])
            text = str(e["entry"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"{where}d[{i}]: {exc}") from exc
        if x not in degrees or y not in degrees:
            raise ValidationError(f"{where}d[{i}]: unknown basis element")
        val = parse_laurent(text, n, source=f"{where}d[{i}]")
        d.setdefault(x, {})[y] = d[x][y] + val if y in d.get(x, {}) else val
    C = FiniteComplex(basis, degrees, d, data.get("grading", "z"), n, data.get("name", ""))
    if C.grading == "z":
        for x, col in C.d.items():
            for y in col:
                if C.degrees[y] != C.degrees[x] + 1:
                    raise ValidationError(f"{where}d entry {x} -> {y} does not raise degree by one")
    if C.d_squared():
        raise ValidationError(f"{where}d^2 != 0")
    return C


def complex_to_dict(C: FiniteComplex) -> dict:
    n = C.ring_rank or 1
    C = laurent_complex(C, n)
    return {"name": C.name, "ring_rank": n, "grading": C.grading,
            "basis": [{"id": str(b), "degree": C.degrees[b]} for b in C.basis],
            "d": [{"from": str(x), "to": str(y), "entry": str(v)}
                  for x in C.basis for y, v in sorted(C.d.get(x, {}).items(), key=lambda kv: str(kv[0]))]}
