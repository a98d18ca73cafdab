"""Local-system families of bimodules and modules over the torus Spec Λ[z^V].

A family is the base category's diagonal (or a Yoneda module) whose module
element carries the tautological character z: each structure constant is
weighted by z^{w}, w the decoration vector of the module slot.  The
identification 𝔐|_z = _{Phi_z}B is literal here: restricting the family
at a point gives the graph bimodule of the jump functor Phi_z.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .ainf_core import AInfCategory, Generator, RelationReport
from .ainf_modules import (ModuleLike, ModuleMorphism, check_module_relations, diagonal, left_yoneda,
                           modules_equal, right_yoneda, shift, specialize)
from .bar_convolution import (Convolution, StableReport, StrictFunctor, collapse_diagonal, collapse_yoneda_hom,
                              flat_collapse, graph_bimodule, graph_bimodule_compose, stable_cone_ranks)
from .decoration import (Decoration, DecoratedCategory, PointCharacter, SymbolicCharacter,
                         check_extension_relations)
import random

from .novikov import NovikovScalar
from .torus_ring import TorusPoint

__all__ = ["Decoration", "LocalSystemExtension", "local_system_extension", "DecorationInconsistent", "DecorationMismatch", "FamilyBimodule",
           "FamilyRightModule", "build_local_system_family", "build_decorated_yoneda_family",
           "restrict_family", "rescale_generators", "action_map", "action_cone_report",
           "grouplike_check", "GrouplikeReport", "collapse_reports", "seeded_points", "seeded_pairs"]


class DecorationInconsistent(ValueError):
    def __init__(self, message: str, report: Optional[RelationReport] = None):
        super().__init__(message)
        self.report = report


class DecorationMismatch(ValueError):
    pass


def _check_bound(cat: AInfCategory) -> int:
    return max(cat.k_max + 1, 3)


@dataclass
class _Family:
    cat: AInfCategory
    decoration: Decoration
    module: ModuleLike
    dcat: DecoratedCategory

    @property
    def rank(self) -> int:
        return self.decoration.rank


class FamilyBimodule(_Family):
    """𝔐: the diagonal with Laurent coefficients from the decoration."""

    def at(self, p: TorusPoint) -> ModuleLike:
        """Fiber at p, built directly with the point character."""
        return diagonal(self.cat, PointCharacter(p), self.dcat, name=f"M|{p}")

    def inverse_at(self, p: TorusPoint) -> ModuleLike:
        return diagonal(self.cat, PointCharacter(p.inverse()), self.dcat, name=f"M^-|{p}")


class FamilyRightModule(_Family):
    """h_L^alg: the right Yoneda module of L with Laurent coefficients."""
    obj: str = ""

    def at(self, p: TorusPoint) -> ModuleLike:
        mod = right_yoneda(self.cat, self.obj, PointCharacter(p), self.dcat)
        mod.name = f"h_{self.obj}^alg|{p}"
        return mod


def build_local_system_family(cat: AInfCategory, deco: Decoration, check: bool = True,
                              bound: Optional[int] = None) -> FamilyBimodule:
    """The family 𝔐 over Λ[z^V]; the decoration must satisfy the cocycle condition."""
    deco.validate_against(cat)
    dcat = DecoratedCategory(cat, deco)
    z = SymbolicCharacter.generic(deco.rank)
    mod = diagonal(cat, z, dcat, name="M")
    if check:
        b = bound or _check_bound(cat)
        rep = check_extension_relations(dcat, b)
        if not rep.passed:
            raise DecorationInconsistent(
                f"decorated relations fail on strings of length {rep.failure_lengths}", rep)
        rep = check_module_relations(mod, b)
        if not rep.passed:
            raise DecorationInconsistent("family bimodule relations fail over the Laurent ring", rep)
    return FamilyBimodule(cat, deco, mod, dcat)


def build_decorated_yoneda_family(cat: AInfCategory, obj: str, deco: Decoration, check: bool = True,
                                  bound: Optional[int] = None) -> FamilyRightModule:
    """h_L^alg: right Yoneda module of L whose element carries z."""
    deco.validate_against(cat)
    dcat = DecoratedCategory(cat, deco)
    mod = right_yoneda(cat, obj, SymbolicCharacter.generic(deco.rank), dcat)
    mod.name = f"h_{obj}^alg"
    if check:
        rep = check_module_relations(mod, bound or _check_bound(cat))
        if not rep.passed:
            raise DecorationInconsistent("decorated Yoneda module relations fail", rep)
    fam = FamilyRightModule(cat, deco, mod, dcat)
    fam.obj = obj
    return fam


def restrict_family(fam: _Family, p: TorusPoint) -> ModuleLike:
    """Coefficientwise evaluation of the family at p."""
    if p.n != fam.rank:
        raise DecorationMismatch(f"point has {p.n} coordinates, lattice rank is {fam.rank}")
    mod = specialize(fam.module, p)
    mod.point = p
    return mod


def rescale_generators(mod: ModuleLike, g: Dict) -> Tuple[ModuleLike, ModuleMorphism]:
    """Replace each module generator x by x' = T^{g(x)} x.

    Structure constants become c T^{g(x) - g(y)} for x -> y.  The returned
    isomorphism is the closed morphism M'[1] -> M, x' -> T^{g(x)} x.
    """
    gv = {k: Fraction(v) for k, v in g.items()}

    def tw(x) -> NovikovScalar:
        return NovikovScalar.T(gv.get(x, Fraction(0)))

    def action(left, m, right):
        out = {}
        for y, c in mod.raw(left, m, right).items():
            e = gv.get(m, Fraction(0)) - gv.get(y, Fraction(0))
            out[y] = c * NovikovScalar.T(e) if e else c
        return out
    new = ModuleLike(mod.kind, mod.cat, mod.gens.values(), action, f"{mod.name}'", mod.max_left, mod.max_right)
    src = shift(new)
    iso = ModuleMorphism(src, mod, lambda l, m, r: {} if (l or r) else {m: tw(m)}, "rescale")
    return new, iso


# ------------------------------------------------------------ sampling

def seeded_points(n: int, count: int, seed: int) -> List[TorusPoint]:
    """The identity, then alternately unitary and general seeded points."""
    from .sheaf_analysis import random_point
    rng = random.Random(seed)
    pts = [TorusPoint.identity(n)]
    while len(pts) < count:
        pts.append(random_point(rng, n, unitary=len(pts) % 2 == 1))
    return pts[:count]


def seeded_pairs(n: int, count: int, seed: int) -> List[Tuple[TorusPoint, TorusPoint]]:
    """(T e_i, T^-1 e_i) pairs and a unitary pair first, then seeded random pairs."""
    from .sheaf_analysis import random_point
    rng = random.Random(seed)
    one = NovikovScalar.one()
    pairs = []
    for i in range(n):
        t = TorusPoint(tuple(NovikovScalar.T(1) if j == i else one for j in range(n)))
        pairs.append((t, t.inverse()))
    pairs.append((random_point(rng, n, unitary=True), random_point(rng, n, unitary=True)))
    while len(pairs) < count:
        pairs.append((random_point(rng, n, unitary=rng.random() < 0.5),
                      random_point(rng, n, unitary=rng.random() < 0.5)))
    return pairs[:count]


# ------------------------------------------------------------ collapses

def collapse_reports(fam: FamilyBimodule, p: TorusPoint, n_max: int = 2) -> Dict[str, StableReport]:
    """Stable cone ranks of the collapse maps on the fiber at p.

    ``diagonal``: 𝔐|_p (x) B -> 𝔐|_p.  ``yoneda L L'``: h_{L'}|_p (x) h^L -> 𝔐|_p(L, L').
    """
    cat = fam.cat
    out = {"diagonal": stable_cone_ranks(lambda N: collapse_diagonal(Convolution([fam.at(p), diagonal(cat)], N)),
                                         n_max)}
    ch = PointCharacter(p)
    for a in cat.objects:
        for b in cat.objects:
            def make(N, a=a, b=b):
                conv = Convolution([right_yoneda(cat, b, ch, fam.dcat), left_yoneda(cat, a, None, fam.dcat)], N)
                return collapse_yoneda_hom(conv, fam.dcat)
            out[f"yoneda {a} {b}"] = stable_cone_ranks(make, n_max)
    return out


# ------------------------------------------------------------ action map

def _same_lattice(h: _Family, fam: _Family):
    if h.rank != fam.rank or h.cat is not fam.cat and h.cat.name != fam.cat.name:
        raise DecorationMismatch("families live over different lattices or categories")
    if h.decoration.slots != fam.decoration.slots:
        raise DecorationMismatch("families carry different decorations")


def action_map(h: FamilyRightModule, fam: FamilyBimodule, N: int,
               point: Optional[TorusPoint] = None) -> ModuleMorphism:
    """h_L (x) 𝔐 -> h_L^alg, strings (x, x_1, ..., m | y...) to z-weighted mu.

    With ``point`` the map is built on the fibers at that point.
    """
    _same_lattice(h, fam)
    cat = fam.cat
    base = right_yoneda(cat, h.obj, None, fam.dcat)
    if point is None:
        mid, tgt = fam.module, h.module
    else:
        mid, tgt = fam.at(point), h.at(point)
    conv = Convolution([base, mid], N)
    return flat_collapse(conv, tgt, "action_map", fam.dcat)


def action_cone_report(h: FamilyRightModule, fam: FamilyBimodule, point: TorusPoint,
                       n_max: int = 3) -> StableReport:
    return stable_cone_ranks(lambda N: action_map(h, fam, N, point), n_max)


# ------------------------------------------------------------ group-like

@dataclass
class LocalSystemExtension:
    """The category with objects (X, g), g running over finitely many torus points.

    hom((X, g), (Y, h)) is a copy of hom(X, Y) whose elements carry the
    local-system jump h g^{-1}; structure constants are weighted by those
    jumps.  Point index 0 is the identity, so (X, 0) is a copy of X.
    """
    cat: AInfCategory
    dcat: DecoratedCategory
    points: List[TorusPoint]

    def obj(self, base_obj: str, i: int = 0) -> str:
        return f"{base_obj}@{i}"


def local_system_extension(dcat: DecoratedCategory, points: Sequence[TorusPoint]) -> LocalSystemExtension:
    base = dcat.cat
    pts: List[TorusPoint] = [TorusPoint.identity(dcat.rank)]
    for p in points:
        if p not in pts:
            pts.append(p)
    idx = range(len(pts))
    objs = [f"{o}@{i}" for o in base.objects for i in idx]

    def gid(x, i, j):
        return f"{x}@{i}.{j}"
    gens = [Generator(gid(g.id, i, j), f"{g.source}@{i}", f"{g.target}@{j}", g.degree)
            for g in base.generators.values() for i in idx for j in idx]
    units = {f"{o}@{i}": gid(u, i, i) for o, u in base.units.items() for i in idx}
    cat = AInfCategory(objs, gens, base.grading, units, f"{base.name}+local-systems")
    deco = Decoration(dcat.rank)
    ratio = {(i, j): PointCharacter(pts[j] * pts[i].inverse()) for i in idx for j in idx}
    for e in base.entries:
        k = len(e.inputs)
        vecs = dcat.deco.get(e.address)
        for labels in _label_paths(len(pts), k + 1):
            # labels[n] decorates the n-th node of the path x_1, ..., x_k
            ins = tuple(gid(x, labels[k - 1 - n], labels[k - n]) for n, x in enumerate(e.inputs))
            coef = e.coefficient
            if vecs is not None:
                for n, w in enumerate(vecs):
                    if any(w):
                        coef = coef * ratio[(labels[k - 1 - n], labels[k - n])].power(w)
            entry = cat.add_mu(ins, gid(e.output, labels[0], labels[k]), coef)
            if vecs is not None:
                deco.set(entry.address, vecs)
    return LocalSystemExtension(cat, DecoratedCategory(cat, deco), pts)


def _label_paths(m: int, length: int):
    if length == 0:
        yield ()
        return
    for rest in _label_paths(m, length - 1):
        for i in range(m):
            yield rest + (i,)


@dataclass
class GrouplikeReport:
    identity_is_diagonal: bool
    pairs: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.identity_is_diagonal and all(p["acyclic"] and p["target_matches"] for p in self.pairs)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "identity_is_diagonal": self.identity_is_diagonal,
                "pairs": self.pairs}


def grouplike_check(fam: FamilyBimodule, samples: Sequence[Tuple[TorusPoint, TorusPoint]], N: int = 1,
                    bound: int = 3) -> GrouplikeReport:
    """𝔐|_1 = diagonal, and 𝔐|_{z2} (x) 𝔐|_{z1} -> 𝔐|_{z1 z2} is a quasi-isomorphism per sample.

    The convolution runs over the local-system extension by z2: the
    middle of the bar complex then reaches the twisted objects through
    which the Yoneda collapse factors.  Over the bare category the fibers
    at z != 1 can be acyclic while the diagonal is not, so no such map
    could be a quasi-isomorphism there.  The cone is read off at the
    untwisted objects.
    """
    cat = fam.cat
    one = TorusPoint.identity(fam.rank)
    ident = modules_equal(restrict_family(fam, one), diagonal(cat), bound)
    rep = GrouplikeReport(ident)
    for z1, z2 in samples:
        phi = StrictFunctor(PointCharacter(z1))
        psi = StrictFunctor(PointCharacter(z2))
        ext = local_system_extension(fam.dcat, [z2])
        values = [(ext.obj(a), ext.obj(b)) for a in cat.objects for b in cat.objects]

        def make(n, phi=phi, psi=psi, ext=ext):
            return graph_bimodule_compose(ext.cat, phi, psi, n, ext.dcat)[1]
        stable = stable_cone_ranks(make, N, values=values)
        target = graph_bimodule(cat, phi.compose(psi), fam.dcat)
        matches = modules_equal(target, restrict_family(fam, z1 * z2), bound)
        rep.pairs.append({"z1": str(z1), "z2": str(z2), "n0": stable.n0, "is_complex": stable.is_complex,
                          "acyclic": stable.acyclic, "stable_cone_rank": stable.stable_total(N),
                          "target_matches": matches})
    return rep
