"""Truncated bar convolutions, collapse maps and graph-bimodule composition.

A convolution F_0 (x) F_1 (x) ... (x) F_r over the category has basis the
flattened strings

    (f_0, x^1_1, ..., x^1_p, f_1, x^2_1, ..., f_r)

where the f_i are module elements and the x's are category elements.
With ||string|| = sum of the ||tokens||, the differential and the external
actions are sums over blocks of ``(-1)^{sum ||tokens right of block||}``
times the structure map of whichever factor the block touches (or mu of
the category for a block of middle tokens).  Collapse maps are the same
kind of block operation, so all closedness statements reduce to the
A-infinity relations of the factors.

Truncation keeps strings with at most N middle tokens in total; since no
block ever increases that number, the truncation is a subcomplex and
d^2 = 0 holds exactly.  When the category is strictly unital the complex
is normalized: strings with a unit in a middle slot are dropped.
Truncation does create spurious cohomology at the top length, so ranks
are read through :func:`complexes.stable_cohomology`, i.e. as the image of
H(A_N) in H(A_{N+1}).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from .ainf_core import AInfCategory, add_into
from .ainf_modules import FlatInfo, IncompatibleKinds, ModGen, ModuleLike, ModuleMorphism, diagonal
from .complexes import FiniteComplex, cone_complex, induced_rank, stable_cohomology, total
from .decoration import Character, DecoratedCategory, multiply
from .novikov import NovikovScalar


class WrongShape(ValueError):
    pass


class NotStrict(ValueError):
    pass


_KIND_TABLE = {
    ("right", "left"): "complex",
    ("right", "bimodule"): "right",
    ("bimodule", "left"): "left",
    ("bimodule", "bimodule"): "bimodule",
}


def _result_kind(kinds: Sequence[str]) -> str:
    if len(kinds) < 2:
        raise IncompatibleKinds("a convolution needs at least two factors")
    for k in kinds[1:-1]:
        if k != "bimodule":
            raise IncompatibleKinds(f"middle factors must be bimodules, got {k}")
    key = (kinds[0], kinds[-1])
    if key not in _KIND_TABLE:
        raise IncompatibleKinds(f"cannot convolve {kinds[0]} with {kinds[-1]}")
    return _KIND_TABLE[key]


def _is_cat(tok) -> bool:
    return tok[0] == "c"


class Convolution(ModuleLike):
    """Truncated (normalized) bar convolution of a list of factors."""

    def __init__(self, factors: Sequence[ModuleLike], N: int, normalized: Optional[bool] = None):
        cat = factors[0].cat
        kind = _result_kind([f.kind for f in factors])
        self.factors = list(factors)
        self.N = N
        if normalized is None:
            normalized = all(o in cat.units for o in cat.objects)
        self.normalized = normalized
        self._units = frozenset(cat.units.values()) if normalized else frozenset()
        self._flat_op = self._make_flat_op(cat)
        gens = self._enumerate(cat)
        name = " (x) ".join(f.name for f in factors) + f" [N={N}]"
        super().__init__(kind, cat, gens, self._action, name,
                         factors[0].max_left, factors[-1].max_right)

    # -- basis
    def _enumerate(self, cat: AInfCategory) -> List[ModGen]:
        by_target: Dict[str, List[str]] = {}
        for g in cat.generators.values():
            if g.id not in self._units:
                by_target.setdefault(g.target, []).append(g.id)
        for v in by_target.values():
            v.sort()
        gens = []
        r = len(self.factors) - 1

        def grow(prefix: Tuple, src: str, idx: int, used: int, sd: int):
            # prefix ends in factor idx-1's token whose source is src
            fac = self.factors[idx]
            for g in fac.basis(target=src):
                tok = (idx, g.id)
                new = prefix + (tok,)
                nsd = sd + g.degree - 1
                if idx == r:
                    gens.append(ModGen(new, g.source, self._first_target(new), nsd + 1))
                else:
                    grow(new, g.source, idx + 1, used, nsd)
            if used < self.N:
                for x in by_target.get(src, []):
                    xg = cat.generators[x]
                    grow(prefix + (("c", x),), xg.source, idx, used + 1, sd + xg.degree - 1)

        for g in self.factors[0].basis():
            grow(((0, g.id),), g.source, 1, 0, g.degree - 1)
        return gens

    def _first_target(self, flat) -> Optional[str]:
        return self.factors[0].gens[flat[0][1]].target

    def mid_length(self, bar) -> int:
        return sum(1 for t in bar if _is_cat(t))

    # -- structure
    def _make_flat_op(self, cat: AInfCategory):
        factors = self.factors

        def op(block):
            pos = [i for i, t in enumerate(block) if not _is_cat(t)]
            if len(pos) > 1:
                return None
            if not pos:
                return {("c", y): c for y, c in cat.mu(tuple(t[1] for t in block)).items()}
            i = pos[0]
            fi, m = block[i]
            fac = factors[fi]
            left = tuple(t[1] for t in block[:i])
            right = tuple(t[1] for t in block[i + 1:])
            if left and fac.kind not in ("left", "bimodule"):
                return None
            if right and fac.kind not in ("right", "bimodule"):
                return None
            return {(fi, y): c for y, c in fac.raw(left, m, right).items()}

        return op

    def tok_sdeg(self, tok) -> int:
        if _is_cat(tok):
            return self.cat.sdeg(tok[1])
        return self.factors[tok[0]].sdeg(tok[1])

    def _action(self, left: Tuple, bar: Tuple, right: Tuple) -> Dict:
        flat = tuple(("c", x) for x in left) + bar + tuple(("c", y) for y in right)
        n = len(flat)
        nl, nr = len(left), len(right)
        first_fac = nl
        last_fac = n - nr - 1
        suffix = [0] * (n + 1)
        for i in range(n - 1, -1, -1):
            suffix[i] = suffix[i + 1] + self.tok_sdeg(flat[i])
        out: Dict = {}
        for a in range(n):
            if nl and a != 0:
                break
            for b in range(a + 1, n + 1):
                if nr and b != n:
                    continue
                if nl and b <= first_fac:
                    continue
                if nr and a > last_fac:
                    continue
                inner = self._flat_op(flat[a:b])
                if not inner:
                    continue
                negative = suffix[b] % 2 == 1
                for tok, c in inner.items():
                    if _is_cat(tok) and tok[1] in self._units:
                        continue
                    new = flat[:a] + (tok,) + flat[b:]
                    add_into(out, new, -c if negative else c)
        return out

    def complex(self, source: Optional[str] = None, target: Optional[str] = None) -> FiniteComplex:
        return module_complex(self, source, target)


def convolve(a: ModuleLike, b: ModuleLike, N: int, normalized: Optional[bool] = None) -> Convolution:
    return Convolution([a, b], N, normalized)


def convolve_many(factors: Sequence[ModuleLike], N: int, normalized: Optional[bool] = None) -> Convolution:
    return Convolution(factors, N, normalized)


# ------------------------------------------------------------- complexes

def module_complex(mod: ModuleLike, source: Optional[str] = None, target: Optional[str] = None,
                   gens: Optional[Sequence[ModGen]] = None) -> FiniteComplex:
    """The chain complex (mu^{0|1|0}) of a module, optionally at one value space."""
    gens = list(gens) if gens is not None else mod.basis(source, target)
    ids = [g.id for g in gens]
    degrees = {g.id: g.degree for g in gens}
    d = {g.id: dict(mod.raw((), g.id, ())) for g in gens}
    return FiniteComplex(ids, degrees, d, mod.cat.grading, None, mod.name)


def morphism_complexes(f: ModuleMorphism, source: Optional[str] = None,
                       target: Optional[str] = None) -> Tuple[FiniteComplex, FiniteComplex, FiniteComplex]:
    """(src, tgt, cone) chain complexes of f at one value space (or all)."""
    src = module_complex(f.src, source, target)
    tgt = module_complex(f.tgt, source, target)
    fmap = {x: dict(f.apply((), x, ())) for x in src.basis}
    return src, tgt, cone_complex(src, tgt, fmap, 1, f"cone({f.name})")


# ---------------------------------------------------------- morphisms

def _require(cond: bool, msg: str):
    if not cond:
        raise WrongShape(msg)


def flat_jump(mod: ModuleLike):
    info = getattr(mod, "flat", None)
    if info is None:
        raise WrongShape(f"factor {mod.name} is not a Yoneda, diagonal or family module")
    return info


def _flat_collapse(conv: Convolution, dcat: DecoratedCategory):
    jumps_by_factor = [flat_jump(f).jump for f in conv.factors]
    scales = [flat_jump(f).scale for f in conv.factors]

    def component(left, bar, right):
        ids = left + tuple(t[1] for t in bar) + right
        jumps = (None,) * len(left) + tuple(None if _is_cat(t) else jumps_by_factor[t[0]] for t in bar) \
            + (None,) * len(right)
        out = dcat.twisted_mu(ids, jumps)
        w = _scale_weight(conv, left, bar, scales)
        if w is not None:
            out = {k: v * w for k, v in out.items()}
        return out

    return component


def _scale_weight(conv, left, bar, scales):
    # a factor's left scale acts on every token left of that factor's element
    w = None
    n_before = list(left)
    for t in bar:
        if _is_cat(t):
            n_before.append(t[1])
            continue
        sc = scales[t[0]]
        if sc is not None:
            for x in n_before:
                s = sc.get(x)
                if s is not None:
                    w = s if w is None else w * s
        n_before.append(t[1])
    return w


def hom_complex_module(cat: AInfCategory, source: str, target: str, jump: Optional[Character] = None,
                       dcat: Optional[DecoratedCategory] = None) -> ModuleLike:
    """hom(source, target) as a chain complex; with a jump, the family 𝔐(L, L') at that character."""
    dc = dcat or DecoratedCategory(cat)
    gens = [ModGen(g.id, g.source, g.target, g.degree) for g in cat.generators.values()
            if g.source == source and g.target == target]

    def action(left, m, right):
        return dc.twisted_mu((m,), (jump,)) if jump is not None else cat.mu((m,))
    return ModuleLike("complex", cat, gens, action, f"hom({source},{target})")


def collapse_diagonal(conv: Convolution) -> ModuleMorphism:
    """M (x) diagonal -> M, (a, x_p, ..., x_1, b | y...) -> mu_M(a | x_p, ..., x_1, b, y...)."""
    _require(len(conv.factors) == 2, "collapse_diagonal needs exactly two factors")
    m, dg = conv.factors
    info = getattr(dg, "flat", None)
    _require(info is not None and info.role == "diagonal" and info.jump is None and info.scale is None,
             "right factor must be the diagonal bimodule")

    def component(left, bar, right):
        a = bar[0][1]
        rest = tuple(t[1] for t in bar[1:]) + right
        return m.raw(left, a, rest)
    return ModuleMorphism(conv, m, component, "collapse_diagonal")


def collapse_yoneda_hom(conv: Convolution, dcat: Optional[DecoratedCategory] = None) -> ModuleMorphism:
    """h_{L'} (x) h^L -> hom(L, L'), strings to mu of the whole string.

    Jumps carried by the Yoneda factors decorate the target, which is then
    the family's hom complex at that character.  A middle bimodule factor
    is refused: mu of the whole string is off by one degree there, and
    the correct map is a composite of two collapses.
    """
    fs = conv.factors
    _require(len(fs) == 2, "collapse_yoneda_hom needs h_L' (x) h^L")
    i0, i1 = flat_jump(fs[0]), flat_jump(fs[-1])
    _require(i0.role == "right_yoneda" and i1.role == "left_yoneda", "outer factors must be Yoneda modules")
    jump = None
    for f in fs:
        jump = multiply(jump, flat_jump(f).jump)
    dc = dcat or i0.dcat
    tgt = hom_complex_module(conv.cat, i1.obj, i0.obj, jump, dc)
    return ModuleMorphism(conv, tgt, _flat_collapse(conv, dc), "collapse_yoneda_hom")


def flat_collapse(conv: Convolution, target: ModuleLike, name: str = "collapse",
                  dcat: Optional[DecoratedCategory] = None) -> ModuleMorphism:
    """Generic collapse: the whole flattened string goes to twisted mu."""
    dc = dcat or flat_jump(conv.factors[0]).dcat
    return ModuleMorphism(conv, target, _flat_collapse(conv, dc), name)


def contract_middle(conv: Convolution) -> ModuleMorphism:
    """h_{L''} (x) (h^{L'} (x) h_{L'}) (x) h^L -> h_{L''} (x) diagonal (x) h^L.

    The middle element m (x) m' and its neighbours contract to
    mu(x_1, ..., x_k, m, m', x'_1, ..., x'_l), which becomes the diagonal element.
    """
    _require(len(conv.factors) == 3, "contract_middle needs three factors")
    f0, y, f2 = conv.factors
    yi = getattr(y, "yoneda_pair", None)
    _require(yi is not None, "middle factor must be a Yoneda bimodule h^L' (x) h_L'")
    cat = conv.cat
    dg = diagonal(cat)
    tgt = Convolution([f0, dg, f2], conv.N, conv.normalized)
    units = conv._units

    def component(left, bar, right):
        if left or right:
            return {}
        pos = next(i for i, t in enumerate(bar) if t[0] == 1)
        m, m2 = bar[pos][1]
        flat = bar[:pos] + (("c", m), ("c", m2)) + bar[pos + 1:]
        # blocks containing both m and m2 (flat positions pos, pos+1) between the outer factors
        lo = max(i for i, t in enumerate(bar[:pos]) if not _is_cat(t)) + 1
        hi = pos + 1 + next(i for i, t in enumerate(flat[pos + 2:]) if not _is_cat(t)) + 1
        n = len(flat)
        suffix = [0] * (n + 1)
        for i in range(n - 1, -1, -1):
            t = flat[i]
            suffix[i] = suffix[i + 1] + (cat.sdeg(t[1]) if _is_cat(t) else conv.factors[t[0]].sdeg(t[1]))
        out: Dict = {}
        for a in range(lo, pos + 1):
            for b in range(pos + 2, hi + 1):
                got = cat.mu(tuple(t[1] for t in flat[a:b]))
                negative = suffix[b] % 2 == 1
                for yid, c in got.items():
                    new = flat[:a] + ((1, yid),) + flat[b:]
                    if len([t for t in new if _is_cat(t)]) > tgt.N:
                        continue
                    add_into(out, new, -c if negative else c)
        return out
    return ModuleMorphism(conv, tgt, component, "contract_middle")


# ------------------------------------------------------- strict functors

@dataclass(frozen=True)
class StrictFunctor:
    """Object-fixing strict functor: a lattice jump character and/or generator scaling.

    The graph bimodule _Phi B is the diagonal whose left action goes
    through Phi (scaled inputs) and whose element carries the jump.
    """
    jump: Optional[Character] = None
    scale: Optional[Tuple[Tuple[str, NovikovScalar], ...]] = None

    @staticmethod
    def identity() -> "StrictFunctor":
        return StrictFunctor()

    @staticmethod
    def scaling(scale: Dict[str, object]) -> "StrictFunctor":
        return StrictFunctor(None, tuple(sorted((k, NovikovScalar.coerce(v)) for k, v in scale.items())))

    def scale_map(self) -> Optional[Dict[str, NovikovScalar]]:
        return dict(self.scale) if self.scale else None

    def compose(self, other: "StrictFunctor") -> "StrictFunctor":
        a, b = self.scale_map() or {}, other.scale_map() or {}
        sc = {}
        for k in set(a) | set(b):
            sc[k] = a.get(k, NovikovScalar.one()) * b.get(k, NovikovScalar.one())
        return StrictFunctor(multiply(self.jump, other.jump),
                             tuple(sorted(sc.items())) if sc else None)

    def inverse(self) -> "StrictFunctor":
        sc = self.scale_map()
        return StrictFunctor(self.jump.inverse() if self.jump is not None else None,
                             tuple(sorted((k, v.invert()) for k, v in sc.items())) if sc else None)

    def check_strict(self, cat: AInfCategory) -> None:
        sc = self.scale_map()
        if not sc:
            return
        one = NovikovScalar.one()
        for e in cat.entries:
            lhs = sc.get(e.output, one)
            rhs = one
            for x in e.inputs:
                rhs = rhs * sc.get(x, one)
            if lhs != rhs:
                raise NotStrict(f"scaling does not commute with mu{e.k}{e.inputs} -> {e.output}")


def graph_bimodule(cat: AInfCategory, phi: StrictFunctor, dcat: Optional[DecoratedCategory] = None) -> ModuleLike:
    """_Phi B: the diagonal with left inputs through Phi and the element jump of Phi."""
    phi.check_strict(cat)
    dc = dcat or DecoratedCategory(cat)
    mod = diagonal(cat, phi.jump, dc, name="graph")
    sc = phi.scale_map()
    if sc:
        base = mod._action

        def action(left, m, right):
            got = base(left, m, right)
            w = None
            for x in left:
                s = sc.get(x)
                if s is not None:
                    w = s if w is None else w * s
            return {k: v * w for k, v in got.items()} if w is not None else got
        mod._action = action
        mod._cache.clear()
    mod.flat = FlatInfo("graph", dc, phi.jump, sc)
    mod.functor = phi
    return mod


def graph_bimodule_compose(cat: AInfCategory, phi: StrictFunctor, psi: StrictFunctor, N: int,
                           dcat: Optional[DecoratedCategory] = None):
    """_Psi B (x) _Phi B -> _{Phi o Psi} B.

    (x..., m, mid..., m', y...) -> Phi(x)Psi(x) Phi(m) Phi(mid) mu(x..., m, mid..., m', y...)
    with the jumps of m and m' multiplying to the target jump.  Returns
    (convolution, morphism).
    """
    dc = dcat or DecoratedCategory(cat)
    bpsi = graph_bimodule(cat, psi, dc)
    bphi = graph_bimodule(cat, phi, dc)
    comp = phi.compose(psi)
    target = graph_bimodule(cat, comp, dc)
    conv = Convolution([bpsi, bphi], N)
    sphi, spsi = phi.scale_map() or {}, psi.scale_map() or {}
    jumps = (psi.jump, phi.jump)

    def component(left, bar, right):
        ids = left + tuple(t[1] for t in bar) + right
        js = (None,) * len(left) + tuple(None if _is_cat(t) else jumps[t[0]] for t in bar) + (None,) * len(right)
        out = dc.twisted_mu(ids, js)
        if not out or not (sphi or spsi):
            return out
        w = NovikovScalar.one()
        for x in left:
            w = w * sphi.get(x, NovikovScalar.one()) * spsi.get(x, NovikovScalar.one())
        for t in bar:
            if t[0] == 1:
                break
            w = w * sphi.get(t[1], NovikovScalar.one())
        return {k: v * w for k, v in out.items()}
    return conv, ModuleMorphism(conv, target, component, "graph_compose")


# ------------------------------------------------------- stabilization

@dataclass
class StableReport:
    """Stable cone cohomology per truncation and the first N after which it is constant."""
    ranks: Dict[int, Dict]
    n0: Optional[int]
    n_max: int
    # False when the cone has d^2 != 0 (a map that is not closed, or inputs that are not modules)
    is_complex: bool = True

    def stable_total(self, N: Optional[int] = None) -> int:
        N = self.n0 if N is None else N
        return total(self.ranks[N])

    @property
    def acyclic(self) -> bool:
        return self.is_complex and self.n0 is not None and self.stable_total(self.n_max) == 0

    def as_dict(self) -> dict:
        return {"n0": self.n0, "n_max": self.n_max, "is_complex": self.is_complex,
                "acyclic": self.acyclic,
                "stable_cone_rank": {str(k): total(v) for k, v in sorted(self.ranks.items())}}


def stable_cone_ranks(make_morphism: Callable[[int], ModuleMorphism], n_max: int,
                      source: Optional[str] = None, target: Optional[str] = None,
                      values: Optional[Sequence] = None) -> StableReport:
    """Stable cohomology of cone(f_N) for N = 0..n_max, via the subcomplex at N inside N+1.

    ``make_morphism(N)`` builds the morphism out of a convolution truncated
    at N.  ``values`` lists the value spaces (source, target) to include;
    by default all of them.
    """
    f = make_morphism(n_max + 1)
    conv = f.src
    spaces = values if values is not None else ([(source, target)] if (source or target) else [None])
    ranks: Dict[int, Dict] = {}
    big_parts = []
    for sp in spaces:
        s, t = (sp if sp is not None else (None, None))
        big_parts.append(morphism_complexes(f, s, t)[2])
    is_complex = all(not big.d_squared() for big in big_parts)
    for N in range(0, n_max + 1):
        acc: Dict = {}
        for big in big_parts:
            keep_b = {b for b in big.basis if b[0] == "tgt" or conv.mid_length(b[1]) <= N + 1}
            keep_a = {b for b in big.basis if b[0] == "tgt" or conv.mid_length(b[1]) <= N}
            part = stable_cohomology(big.restrict(keep_b), keep_a)
            for k, v in part.items():
                acc[k] = acc.get(k, 0) + v
        ranks[N] = acc
    n0 = None
    for N in range(n_max, -1, -1):
        if _nz(ranks[N]) == _nz(ranks[n_max]):
            n0 = N
        else:
            break
    return StableReport(ranks, n0, n_max, is_complex)


def _nz(d: Dict) -> Dict:
    return {k: v for k, v in d.items() if v}


def induced_cohomology_rank(src: FiniteComplex, tgt: FiniteComplex, fmap: Dict, map_degree: int = 1) -> int:
    return induced_rank(src, tgt, cone_complex(src, tgt, fmap, map_degree))
