"""Modules and bimodules over an A-infinity category, morphisms, shifts and cones.

A module element sits inside a string of category elements,
``(x_k, ..., x_1, m, y_1, ..., y_l)``, exactly like a morphism of the
category would.  Structure maps, morphisms and the A-infinity relations all
use the block rule of :mod:`ainf_core` on such flattened strings, with
||m|| = |m| - 1.  Consequences of that single rule:

* every structure map and every pre-morphism has shifted degree +1;
* cone(f) for f: M -> N is M + N with differential [[mu_M, 0], [f, mu_N]]
  and no further signs (the usual shift of M is absorbed by the degree of f);
* the identity of N is the closed morphism N[1] -> N, where the structure
  maps of N[1] are -(-1)^{sum ||y||} mu_N.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .ainf_core import (AInfCategory, RelationFailure, RelationReport, UnknownObject,
                        ValidationError, add_into, block_relation)
from .decoration import Character, DecoratedCategory
from .novikov import NovikovScalar, format_novikov, parse_novikov
from .torus_ring import LaurentElement, TorusPoint, eval_at_point

KINDS = ("right", "left", "bimodule", "complex")


class NotClosed(ValueError):
    pass


class IncompatibleKinds(ValueError):
    pass


@dataclass(frozen=True)
class ModGen:
    """Basis element of a module.

    ``target`` is the object where left category inputs attach and
    ``source`` the one for right inputs, as for a morphism source -> target.
    """
    id: Hashable
    source: Optional[str]
    target: Optional[str]
    degree: int


Action = Callable[[Tuple, Hashable, Tuple], Dict]


@dataclass
class FlatInfo:
    """How a module evaluates on flattened strings: twisted mu with this jump.

    ``scale`` multiplies left inputs (graph bimodules of scaling functors).
    """
    role: str
    dcat: DecoratedCategory
    jump: Optional[Character] = None
    scale: Optional[Dict[str, NovikovScalar]] = None
    obj: Optional[str] = None


class ModuleLike:
    """Free module with structure maps given by an action callback.

    ``action(left, m, right)`` returns a dict ``{basis id: coefficient}``
    for mu(left..., m, right...).  Strings are not validated there; use
    :meth:`act` for checked evaluation.
    """

    def __init__(self, kind: str, cat: AInfCategory, gens: Iterable[ModGen], action: Action,
                 name: str = "", max_left: int = 8, max_right: int = 8):
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        self.kind = kind
        self.cat = cat
        self.gens: Dict[Hashable, ModGen] = {}
        for g in gens:
            self.gens[g.id] = g
        self._action = action
        self.name = name
        self.max_left = max_left if kind in ("left", "bimodule") else 0
        self.max_right = max_right if kind in ("right", "bimodule") else 0
        self._cache: Dict = {}
        self.flat: Optional[FlatInfo] = None
        self.yoneda_pair: Optional[Tuple[str, str]] = None

    def sdeg(self, m) -> int:
        return self.gens[m].degree - 1

    def raw(self, left: Tuple, m, right: Tuple) -> Dict:
        key = (left, m, right)
        got = self._cache.get(key)
        if got is None:
            got = self._action(left, m, right) or {}
            if len(self._cache) < 500000:
                self._cache[key] = got
        return got

    def act(self, left: Sequence[str], m, right: Sequence[str]) -> Dict:
        left, right = tuple(left), tuple(right)
        if left and self.max_left == 0 or right and self.max_right == 0:
            raise ValueError(f"{self.kind} module has no action on that side")
        if m not in self.gens:
            raise KeyError(m)
        if not _attached(self.cat, left, self.gens[m], right):
            from .ainf_core import NonComposable
            raise NonComposable(f"string {left} | {m} | {right} is not composable")
        return self.raw(left, m, right)

    def basis(self, source: Optional[str] = None, target: Optional[str] = None) -> List[ModGen]:
        out = []
        for g in self.gens.values():
            if source is not None and g.source != source:
                continue
            if target is not None and g.target != target:
                continue
            out.append(g)
        return sorted(out, key=lambda g: str(g.id))

    def value_objects(self) -> List[Tuple[Optional[str], Optional[str]]]:
        return sorted({(g.source, g.target) for g in self.gens.values()}, key=str)


def _attached(cat: AInfCategory, left: Tuple, g: ModGen, right: Tuple) -> bool:
    if left:
        if not cat.composable(left) or cat.generators[left[-1]].source != g.target:
            return False
    if right:
        if not cat.composable(right) or cat.generators[right[0]].target != g.source:
            return False
    return True


def _arity(cat: AInfCategory) -> int:
    return max(cat.k_max - 1, 1)


# -------------------------------------------------------------- enumeration

def left_chains(cat: AInfCategory, obj: str, k: int, skip: frozenset = frozenset()) -> List[Tuple[str, ...]]:
    """Composable (x_k, ..., x_1) with source(x_1) = obj."""
    out = [()]
    for _ in range(k):
        nxt = []
        for t in out:
            start = obj if not t else cat.generators[t[0]].target
            for g in cat.generators.values():
                if g.source == start and g.id not in skip:
                    nxt.append((g.id,) + t)
        out = nxt
    return sorted(out)


def right_chains(cat: AInfCategory, obj: str, l: int, skip: frozenset = frozenset()) -> List[Tuple[str, ...]]:
    """Composable (y_1, ..., y_l) with target(y_1) = obj (y_1 next to the module)."""
    out = [()]
    for _ in range(l):
        nxt = []
        for t in out:
            end = obj if not t else cat.generators[t[-1]].source
            for g in cat.generators.values():
                if g.target == end and g.id not in skip:
                    nxt.append(t + (g.id,))
        out = nxt
    return sorted(out)


# ---------------------------------------------------------- relation check

def _module_op(mod: ModuleLike):
    cat = mod.cat

    def op(block):
        pos = [i for i, t in enumerate(block) if t[0] == "m"]
        if not pos:
            return {("c", y): c for y, c in cat.mu(tuple(t[1] for t in block)).items()}
        i = pos[0]
        left = tuple(t[1] for t in block[:i])
        right = tuple(t[1] for t in block[i + 1:])
        return {("m", y): c for y, c in mod.raw(left, block[i][1], right).items()}

    return op


def _sdeg_for(mod: ModuleLike):
    cat = mod.cat

    def sdeg(t):
        return mod.sdeg(t[1]) if t[0] == "m" else cat.sdeg(t[1])

    return sdeg


def module_relation(mod: ModuleLike, left: Tuple, m, right: Tuple) -> Dict:
    string = tuple(("c", x) for x in left) + (("m", m),) + tuple(("c", y) for y in right)
    res = block_relation(string, _module_op(mod), _sdeg_for(mod))
    return {k[1]: v for k, v in res.items()}


def check_module_relations(mod: ModuleLike, bound: int) -> RelationReport:
    """A-infinity module equations on all strings with at most ``bound`` entries (module element included)."""
    report = RelationReport(0, max_length=bound)
    for g in mod.basis():
        for k in range(0, (bound - 1 if mod.max_left else 0) + 1):
            lefts = left_chains(mod.cat, g.target, k) if k else [()]
            for l in range(0, (bound - 1 - k if mod.max_right else 0) + 1):
                rights = right_chains(mod.cat, g.source, l) if l else [()]
                for left in lefts:
                    for right in rights:
                        report.checked += 1
                        res = module_relation(mod, left, g.id, right)
                        if res:
                            report.failures.append(RelationFailure(left + (g.id,) + right, res))
    return report


# ------------------------------------------------------------ constructions

def _scalar_dict(d: Dict, tag=None) -> Dict:
    return dict(d) if tag is None else {(tag, k): v for k, v in d.items()}


def diagonal(cat: AInfCategory, jump: Optional[Character] = None,
             dcat: Optional[DecoratedCategory] = None, name: str = "diagonal") -> ModuleLike:
    """Diagonal bimodule; with a jump, the module element carries that character."""
    gens = [ModGen(g.id, g.source, g.target, g.degree) for g in cat.generators.values()]
    if jump is None:
        def action(left, m, right):
            return cat.mu(left + (m,) + right)
    else:
        dc = dcat or DecoratedCategory(cat)

        def action(left, m, right):
            jumps = (None,) * len(left) + (jump,) + (None,) * len(right)
            return dc.twisted_mu(left + (m,) + right, jumps)
    mod = ModuleLike("bimodule", cat, gens, action, name, _arity(cat), _arity(cat))
    mod.flat = FlatInfo("diagonal" if jump is None else "family", dcat or DecoratedCategory(cat), jump)
    return mod


def right_yoneda(cat: AInfCategory, obj: str, jump: Optional[Character] = None,
                 dcat: Optional[DecoratedCategory] = None) -> ModuleLike:
    """h_L = hom(-, L) with mu(m, y_1, ..., y_l); a jump gives the decorated family."""
    if obj not in cat.objects:
        raise UnknownObject(obj)
    gens = [ModGen(g.id, g.source, g.target, g.degree) for g in cat.generators.values() if g.target == obj]
    dc = dcat or DecoratedCategory(cat)

    def action(left, m, right):
        if jump is None:
            return cat.mu((m,) + right)
        return dc.twisted_mu((m,) + right, (jump,) + (None,) * len(right))
    mod = ModuleLike("right", cat, gens, action, f"h_{obj}", 0, _arity(cat))
    mod.flat = FlatInfo("right_yoneda", dc, jump, None, obj)
    return mod


def left_yoneda(cat: AInfCategory, obj: str, jump: Optional[Character] = None,
                dcat: Optional[DecoratedCategory] = None) -> ModuleLike:
    """h^L = hom(L, -) with mu(x_k, ..., x_1, m)."""
    if obj not in cat.objects:
        raise UnknownObject(obj)
    gens = [ModGen(g.id, g.source, g.target, g.degree) for g in cat.generators.values() if g.source == obj]
    dc = dcat or DecoratedCategory(cat)

    def action(left, m, right):
        if jump is None:
            return cat.mu(left + (m,))
        return dc.twisted_mu(left + (m,), (None,) * len(left) + (jump,))
    mod = ModuleLike("left", cat, gens, action, f"h^{obj}", _arity(cat), 0)
    mod.flat = FlatInfo("left_yoneda", dc, jump, None, obj)
    return mod


def yoneda_bimodule(cat: AInfCategory, obj: str, obj2: str) -> ModuleLike:
    """h^L (x) h_{L'}: value at (A, B) is hom(L, A) (x) hom(B, L').

    The element m (x) m' has ||m (x) m'|| = ||m|| + ||m'||.  Left inputs act
    on m with sign (-1)^{||m'||}, right inputs act on m'.
    """
    for o in (obj, obj2):
        if o not in cat.objects:
            raise UnknownObject(o)
    gens = []
    for a in cat.generators.values():
        if a.source != obj:
            continue
        for b in cat.generators.values():
            if b.target != obj2:
                continue
            gens.append(ModGen((a.id, b.id), b.source, a.target, a.degree + b.degree - 1))

    def action(left, m, right):
        a, b = m
        out: Dict = {}
        if not right:
            sign = cat.sdeg(b) % 2
            for y, c in cat.mu(left + (a,)).items():
                add_into(out, (y, b), -c if sign else c)
        if not left:
            for y, c in cat.mu((b,) + right).items():
                add_into(out, (a, y), c)
        return out
    mod = ModuleLike("bimodule", cat, gens, action, f"h^{obj}(x)h_{obj2}", _arity(cat), _arity(cat))
    mod.yoneda_pair = (obj, obj2)
    return mod


def build_yoneda(cat: AInfCategory, spec) -> ModuleLike:
    """``("right", L)``, ``("left", L)``, ``("bimodule", L, L')`` or ``"diagonal"``."""
    if spec == "diagonal" or spec == ("diagonal",):
        return diagonal(cat)
    kind = spec[0]
    if kind == "right":
        return right_yoneda(cat, spec[1])
    if kind == "left":
        return left_yoneda(cat, spec[1])
    if kind == "bimodule":
        return yoneda_bimodule(cat, spec[1], spec[2])
    raise ValueError(f"unknown Yoneda spec {spec!r}")


def shift(mod: ModuleLike) -> ModuleLike:
    """M[1]: degrees lowered by one, structure maps -(-1)^{sum ||y||} mu_M."""
    gens = [ModGen(g.id, g.source, g.target, g.degree - 1) for g in mod.gens.values()]
    cat = mod.cat

    def action(left, m, right):
        negative = (1 + sum(cat.sdeg(y) for y in right)) % 2 == 1
        got = mod.raw(left, m, right)
        return {k: -v for k, v in got.items()} if negative else dict(got)
    return ModuleLike(mod.kind, cat, gens, action, f"{mod.name}[1]", mod.max_left, mod.max_right)


def specialize(mod: ModuleLike, p: TorusPoint) -> ModuleLike:
    """Evaluate Laurent coefficients at p; Novikov coefficients pass through."""

    def action(left, m, right):
        out = {}
        for k, v in mod.raw(left, m, right).items():
            w = eval_at_point(v, p) if isinstance(v, LaurentElement) else v
            if not w.is_zero():
                out[k] = w
        return out
    return ModuleLike(mod.kind, mod.cat, mod.gens.values(), action, f"{mod.name}|{p}", mod.max_left, mod.max_right)


# --------------------------------------------------------------- morphisms

class ModuleMorphism:
    """Pre-morphism f: M -> N of shifted degree +1, components f(left, m, right)."""

    def __init__(self, src: ModuleLike, tgt: ModuleLike, component: Action, name: str = ""):
        if src.kind != tgt.kind:
            raise IncompatibleKinds(f"morphism between {src.kind} and {tgt.kind} modules")
        self.src = src
        self.tgt = tgt
        self._component = component
        self.name = name
        self._cache: Dict = {}

    def apply(self, left: Tuple, m, right: Tuple) -> Dict:
        key = (left, m, right)
        got = self._cache.get(key)
        if got is None:
            got = self._component(left, m, right) or {}
            if len(self._cache) < 500000:
                self._cache[key] = got
        return got


def identity_morphism(mod: ModuleLike) -> ModuleMorphism:
    """The identity as the closed morphism M[1] -> M."""
    return ModuleMorphism(shift(mod), mod, lambda l, m, r: {} if (l or r) else {m: NovikovScalar.one()},
                          f"id_{mod.name}")


def zero_morphism(src: ModuleLike, tgt: ModuleLike) -> ModuleMorphism:
    return ModuleMorphism(src, tgt, lambda l, m, r: {}, "0")


def scalar_morphism(mod: ModuleLike, c) -> ModuleMorphism:
    """c times the identity, as M[1] -> M."""
    c = NovikovScalar.coerce(c)
    return ModuleMorphism(shift(mod), mod, lambda l, m, r: {} if (l or r) else {m: c}, f"{c}*id")


def cone(f: ModuleMorphism, check_bound: Optional[int] = 3) -> ModuleLike:
    """Cone of a closed morphism; closedness is checked up to ``check_bound`` inputs."""
    src, tgt = f.src, f.tgt
    gens = [ModGen(("src", g.id), g.source, g.target, g.degree) for g in src.gens.values()]
    gens += [ModGen(("tgt", g.id), g.source, g.target, g.degree) for g in tgt.gens.values()]

    def action(left, m, right):
        side, x = m
        if side == "tgt":
            return {("tgt", y): c for y, c in tgt.raw(left, x, right).items()}
        out = {("src", y): c for y, c in src.raw(left, x, right).items()}
        for y, c in f.apply(left, x, right).items():
            out[("tgt", y)] = c
        return out

    result = ModuleLike(src.kind, src.cat, gens, action, f"cone({f.name})",
                        max(src.max_left, tgt.max_left), max(src.max_right, tgt.max_right))
    if check_bound is not None:
        bad = closedness_failures(f, check_bound)
        if bad:
            raise NotClosed(f"morphism {f.name} is not closed; first failure on {bad[0].string}")
    return result


def closedness_failures(f: ModuleMorphism, bound: int) -> List[RelationFailure]:
    """Strings of length <= bound on which d f +- f d does not vanish."""
    src = f.src
    cn = cone(f, check_bound=None)
    fails = []
    for g in src.basis():
        for k in range(0, (bound - 1 if src.max_left else 0) + 1):
            lefts = left_chains(src.cat, g.target, k) if k else [()]
            for l in range(0, (bound - 1 - k if src.max_right else 0) + 1):
                rights = right_chains(src.cat, g.source, l) if l else [()]
                for left in lefts:
                    for right in rights:
                        res = module_relation(cn, left, ("src", g.id), right)
                        res = {y: c for y, c in res.items() if y[0] == "tgt"}
                        if res:
                            fails.append(RelationFailure(left + (g.id,) + right, res))
    return fails


def is_closed(f: ModuleMorphism, bound: int = 3) -> bool:
    return not closedness_failures(f, bound)


# ------------------------------------------------------------ tabulation

def tabulate(mod: ModuleLike, bound: int) -> Dict[Tuple, Dict]:
    """All nonzero structure constants on strings with at most ``bound`` entries."""
    table = {}
    for g in mod.basis():
        for k in range(0, (bound - 1 if mod.max_left else 0) + 1):
            lefts = left_chains(mod.cat, g.target, k) if k else [()]
            for l in range(0, (bound - 1 - k if mod.max_right else 0) + 1):
                rights = right_chains(mod.cat, g.source, l) if l else [()]
                for left in lefts:
                    for right in rights:
                        got = mod.raw(left, g.id, right)
                        if got:
                            table[(left, g.id, right)] = dict(got)
    return table


def explicit_module(kind: str, cat: AInfCategory, gens: Iterable[ModGen], table: Dict[Tuple, Dict],
                    name: str = "explicit") -> ModuleLike:
    table = {k: dict(v) for k, v in table.items()}
    return ModuleLike(kind, cat, gens, lambda l, m, r: table.get((l, m, r), {}), name,
                      _arity(cat), _arity(cat))


def _gid(x) -> str:
    return x if isinstance(x, str) else json.dumps(x)


def module_to_dict(mod: ModuleLike, bound: int) -> dict:
    """Module fixture: the category is referenced by name, tensors are listed explicitly."""
    ids = {g.id: _gid(g.id) for g in mod.gens.values()}
    table = tabulate(mod, bound)
    return {
        "category": mod.cat.name, "kind": mod.kind, "name": mod.name,
        "value_spaces": [{"id": ids[g.id], "source": g.source, "target": g.target, "degree": g.degree}
                         for g in mod.basis()],
        "tensors": [{"left": list(l), "element": ids[m], "right": list(r),
                     "output": {ids[y]: format_novikov(c) for y, c in sorted(out.items(), key=lambda kv: ids[kv[0]])}}
                    for (l, m, r), out in sorted(table.items(), key=lambda kv: (ids[kv[0][1]], kv[0][0], kv[0][2]))],
    }


def module_from_dict(data: dict, cat: AInfCategory, source: Optional[str] = None) -> ModuleLike:
    try:
        kind = data["kind"]
        gens = [ModGen(v["id"], v.get("source"), v.get("target"), int(v["degree"])) for v in data["value_spaces"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad module header: {exc}", source) from None
    known = {g.id for g in gens}
    table: Dict = {}
    for i, t in enumerate(data.get("tensors", [])):
        pos = f"tensors[{i}]"
        try:
            key = (tuple(t["left"]), t["element"], tuple(t["right"]))
            out = {y: parse_novikov(c, source) for y, c in t["output"].items()}
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad tensor entry: {exc}", source, pos) from None
        for y in [key[1], *out]:
            if y not in known:
                raise ValidationError(f"unknown value-space element {y!r}", source, pos)
        for x in key[0] + key[2]:
            if x not in cat.generators:
                raise ValidationError(f"unknown category generator {x!r}", source, pos)
        table[key] = out
    return explicit_module(kind, cat, gens, table, data.get("name", "explicit"))


def modules_equal(a: ModuleLike, b: ModuleLike, bound: int) -> bool:
    """Coefficientwise equality of structure constants up to ``bound`` entries."""
    if set(a.gens) != set(b.gens):
        return False
    ta, tb = tabulate(a, bound), tabulate(b, bound)
    return ta == tb
