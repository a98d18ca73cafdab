"""Finite A-infinity categories given by sparse structure tensors.

Conventions.  Inputs are written mu(x_k, ..., x_1) with x_1 rightmost and
stored as the tuple (x_k, ..., x_1).  A string is composable when
source(x_{i+1}) = target(x_i).  Shifted degrees are ||x|| = |x| - 1 and the
A-infinity relation for a string is

    sum over blocks  (-1)^{||x_1|| + ... + ||x_j||} mu(..., mu(block), x_j, ..., x_1) = 0

where x_1 .. x_j are the elements to the right of the block.  Every other
structure in the package (modules, bar complexes, morphisms, cones) uses
this same rule through :func:`block_relation`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

from .novikov import NovikovScalar, ParseError, format_novikov, parse_novikov


class NonComposable(ValueError):
    pass


class NoUnitsDesignated(ValueError):
    pass


class UnknownObject(KeyError):
    def __str__(self):
        return f"unknown object {self.args[0]!r}"


class ValidationError(ValueError):
    """Structural problem in input data, with file and position diagnostics."""

    def __init__(self, message: str, source: Optional[str] = None, position: Optional[str] = None):
        self.source = source
        self.position = position
        where = ""
        if source:
            where += f"{source}: "
        if position:
            where += f"{position}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class Generator:
    id: str
    source: str
    target: str
    degree: int


@dataclass(frozen=True)
class GradedHomSpace:
    source: str
    target: str
    basis: Tuple[Generator, ...]
    ring: str = "novikov"

    def degrees(self) -> Dict[str, int]:
        return {g.id: g.degree for g in self.basis}


@dataclass(frozen=True)
class MuEntry:
    inputs: Tuple[str, ...]
    output: str
    coefficient: object
    ordinal: int  # position among entries with the same (inputs, output)

    @property
    def k(self) -> int:
        return len(self.inputs)

    @property
    def address(self):
        return (self.inputs, self.output, self.ordinal)


def add_into(acc: Dict, key, value) -> None:
    cur = acc.get(key)
    new = value if cur is None else cur + value
    if new.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = new


def block_relation(string: Tuple, op: Callable[[Tuple], Optional[Dict]],
                   sdeg: Callable[[Hashable], int],
                   allow: Optional[Callable[[int, int], bool]] = None) -> Dict:
    """Sum over blocks of (-1)^{sum ||right||} op(prefix + op(block) + suffix).

    ``op`` maps a tuple of elements to a dict element -> coefficient, or
    returns None/{} when no structure map applies to that tuple.
    """
    n = len(string)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + sdeg(string[i])
    total: Dict = {}
    for a in range(n):
        for b in range(a + 1, n + 1):
            if allow is not None and not allow(a, b):
                continue
            inner = op(string[a:b])
            if not inner:
                continue
            negative = suffix[b] % 2 == 1
            for y, c in inner.items():
                outer = op(string[:a] + (y,) + string[b:])
                if not outer:
                    continue
                for out, c2 in outer.items():
                    term = c * c2
                    add_into(total, out, -term if negative else term)
    return total


def block_differential(string: Tuple, op: Callable[[Tuple], Optional[Dict]],
                       sdeg: Callable[[Hashable], int]) -> Dict:
    """Sum over blocks of (-1)^{sum ||right||} (prefix, op(block), suffix) as new strings."""
    n = len(string)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + sdeg(string[i])
    total: Dict = {}
    for a in range(n):
        for b in range(a + 1, n + 1):
            inner = op(string[a:b])
            if not inner:
                continue
            negative = suffix[b] % 2 == 1
            for y, c in inner.items():
                new = string[:a] + (y,) + string[b:]
                add_into(total, new, -c if negative else c)
    return total


class AInfCategory:
    """Finite A-infinity category with sparse mu tensors.

    Coefficients are NovikovScalars, or LaurentElements after
    :meth:`extend_coefficients`.
    """

    def __init__(self, objects: Sequence[str], generators: Iterable[Generator],
                 grading: str = "z", units: Optional[Dict[str, str]] = None,
                 name: str = "", zero=None):
        if grading not in ("z", "z2"):
            raise ValueError("grading must be 'z' or 'z2'")
        self.name = name
        self.grading = grading
        self.objects = tuple(objects)
        self.generators: Dict[str, Generator] = {}
        self.homs: Dict[Tuple[str, str], List[str]] = {(a, b): [] for a in self.objects for b in self.objects}
        for g in generators:
            if g.id in self.generators:
                raise ValidationError(f"duplicate generator id {g.id!r}")
            for obj in (g.source, g.target):
                if obj not in self.objects:
                    raise UnknownObject(obj)
            deg = g.degree % 2 if grading == "z2" else g.degree
            g = Generator(g.id, g.source, g.target, deg)
            self.generators[g.id] = g
            self.homs[(g.source, g.target)].append(g.id)
        self.units: Dict[str, str] = dict(units or {})
        for obj, u in self.units.items():
            if obj not in self.objects:
                raise UnknownObject(obj)
            g = self.generators.get(u)
            if g is None or g.source != obj or g.target != obj or g.degree != 0:
                raise ValidationError(f"unit {u!r} of {obj!r} must be a degree-0 endomorphism")
        self.entries: List[MuEntry] = []
        self._by_inputs: Dict[Tuple[str, ...], List[MuEntry]] = {}
        self._sum_cache: Dict[Tuple[str, ...], Dict[str, object]] = {}
        self.zero = NovikovScalar.zero() if zero is None else zero

    # ---- construction
    def add_mu(self, inputs: Sequence[str], output: str, coefficient) -> MuEntry:
        inputs = tuple(inputs)
        if not inputs:
            raise ValidationError("mu^0 (curvature) is not supported")
        for x in inputs + (output,):
            if x not in self.generators:
                raise ValidationError(f"unknown generator {x!r}")
        if not self.composable(inputs):
            raise NonComposable(f"inputs {inputs} are not composable")
        out = self.generators[output]
        if out.source != self.generators[inputs[-1]].source or out.target != self.generators[inputs[0]].target:
            raise ValidationError(f"output {output!r} has the wrong endpoints for {inputs}")
        expected = sum(self.generators[x].degree for x in inputs) + 2 - len(inputs)
        if not self._deg_eq(out.degree, expected):
            raise ValidationError(f"mu^{len(inputs)}{inputs} -> {output}: degree {out.degree}, expected {expected}")
        ordinal = sum(1 for e in self._by_inputs.get(inputs, []) if e.output == output)
        entry = MuEntry(inputs, output, coefficient, ordinal)
        self.entries.append(entry)
        self._by_inputs.setdefault(inputs, []).append(entry)
        self._sum_cache.pop(inputs, None)
        return entry

    def _deg_eq(self, a: int, b: int) -> bool:
        return (a - b) % 2 == 0 if self.grading == "z2" else a == b

    @property
    def k_max(self) -> int:
        return max((len(e.inputs) for e in self.entries), default=0)

    def degree(self, x: str) -> int:
        return self.generators[x].degree

    def sdeg(self, x: str) -> int:
        return self.generators[x].degree - 1

    def hom(self, source: str, target: str) -> GradedHomSpace:
        if source not in self.objects:
            raise UnknownObject(source)
        if target not in self.objects:
            raise UnknownObject(target)
        return GradedHomSpace(source, target, tuple(self.generators[g] for g in self.homs[(source, target)]))

    def composable(self, inputs: Sequence[str]) -> bool:
        for left, right in zip(inputs, inputs[1:]):
            if self.generators[left].source != self.generators[right].target:
                return False
        return True

    # ---- evaluation
    def mu_entries(self, inputs: Tuple[str, ...]) -> List[MuEntry]:
        return self._by_inputs.get(inputs, [])

    def mu(self, inputs: Tuple[str, ...]) -> Dict[str, object]:
        """mu on a composable tuple without validation (cached)."""
        got = self._sum_cache.get(inputs)
        if got is None:
            got = {}
            for e in self._by_inputs.get(inputs, ()):
                add_into(got, e.output, e.coefficient)
            self._sum_cache[inputs] = got
        return got

    def apply_mu(self, inputs: Sequence[str]) -> Dict[str, object]:
        inputs = tuple(inputs)
        for x in inputs:
            if x not in self.generators:
                raise ValidationError(f"unknown generator {x!r}")
        if not inputs or not self.composable(inputs):
            raise NonComposable(f"inputs {inputs} are not composable")
        return dict(self.mu(inputs))

    def strings(self, length: int, start_targets: Optional[Iterable[str]] = None) -> Iterator[Tuple[str, ...]]:
        """All composable strings (x_k, ..., x_1) of the given length."""
        out_of: Dict[str, List[str]] = {}
        for g in self.generators.values():
            out_of.setdefault(g.source, []).append(g.id)

        def extend(prefix: List[str]):
            if len(prefix) == length:
                yield tuple(reversed(prefix))
                return
            last = self.generators[prefix[-1]]
            for nxt in out_of.get(last.target, []):
                prefix.append(nxt)
                yield from extend(prefix)
                prefix.pop()

        for g in sorted(self.generators):
            yield from extend([g])

    def relation(self, string: Tuple[str, ...]) -> Dict[str, object]:
        return block_relation(string, self.mu, self.sdeg)

    # ---- transformations
    def extend_coefficients(self, fn, zero) -> "AInfCategory":
        """Copy with every coefficient mapped through ``fn`` (e.g. into a Laurent ring)."""
        new = AInfCategory(self.objects, self.generators.values(), self.grading, self.units, self.name, zero)
        for e in self.entries:
            new.add_mu(e.inputs, e.output, fn(e.coefficient))
        return new

    def shift_degrees(self, by: int) -> "AInfCategory":
        gens = [Generator(g.id, g.source, g.target, g.degree + by) for g in self.generators.values()]
        new = AInfCategory(self.objects, gens, self.grading, None, self.name, self.zero)
        new._skip_degree_check = True
        for e in self.entries:
            ordinal = sum(1 for x in new._by_inputs.get(e.inputs, []) if x.output == e.output)
            entry = MuEntry(e.inputs, e.output, e.coefficient, ordinal)
            new.entries.append(entry)
            new._by_inputs.setdefault(e.inputs, []).append(entry)
        return new

    def copy(self) -> "AInfCategory":
        new = AInfCategory(self.objects, self.generators.values(), self.grading, self.units, self.name, self.zero)
        for e in self.entries:
            new.add_mu(e.inputs, e.output, e.coefficient)
        return new

    def replace_entry(self, index: int, coefficient) -> "AInfCategory":
        """Copy with one entry's coefficient replaced (mutation tests, corrupted fixtures)."""
        new = AInfCategory(self.objects, self.generators.values(), self.grading, self.units, self.name, self.zero)
        for i, e in enumerate(self.entries):
            new.add_mu(e.inputs, e.output, coefficient if i == index else e.coefficient)
        return new

    def find_entry(self, inputs: Sequence[str], output: str, ordinal: int = 0) -> int:
        for i, e in enumerate(self.entries):
            if e.inputs == tuple(inputs) and e.output == output and e.ordinal == ordinal:
                return i
        raise KeyError((tuple(inputs), output, ordinal))


# ------------------------------------------------------------------ reports

@dataclass
class RelationFailure:
    string: Tuple
    residual: Dict

    def as_dict(self) -> dict:
        return {"string": [str(s) for s in self.string],
                "residual": {str(k): str(v) for k, v in sorted(self.residual.items(), key=lambda kv: str(kv[0]))}}


@dataclass
class RelationReport:
    checked: int
    failures: List[RelationFailure] = field(default_factory=list)
    max_length: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def failure_lengths(self) -> List[int]:
        return sorted({len(f.string) for f in self.failures})

    def as_dict(self) -> dict:
        return {"passed": self.passed, "checked": self.checked, "max_length": self.max_length,
                "failure_lengths": self.failure_lengths,
                "failures": [f.as_dict() for f in self.failures]}


def check_ainf_relations(cat: AInfCategory, max_inputs: int) -> RelationReport:
    report = RelationReport(0, max_length=max_inputs)
    for length in range(1, max_inputs + 1):
        for s in cat.strings(length):
            report.checked += 1
            res = cat.relation(s)
            if res:
                report.failures.append(RelationFailure(s, res))
    return report


@dataclass
class UnitReport:
    checked: int
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {"passed": self.passed, "checked": self.checked, "violations": list(self.violations)}


def check_units(cat: AInfCategory, max_inputs: Optional[int] = None) -> UnitReport:
    """Strict unitality: mu^2(x, 1) = x, mu^2(1, x) = (-1)^{|x|} x, higher mu vanish on units.

    Entries with a unit input are all inspected; the sign on the left unit
    law is the one forced by the shifted-degree rule.
    """
    if not cat.units:
        raise NoUnitsDesignated(f"category {cat.name!r} has no designated units")
    unit_ids = set(cat.units.values())
    rep = UnitReport(0)
    one = NovikovScalar.one()
    for x, g in sorted(cat.generators.items()):
        u_src = cat.units.get(g.source)
        u_tgt = cat.units.get(g.target)
        if u_src is not None:
            rep.checked += 1
            got = cat.mu((x, u_src))
            if set(got) != {x} or not _is_one(got[x], 1):
                rep.violations.append(f"mu2({x},{u_src}) = {_fmt(got)}, expected {x}")
        if u_tgt is not None:
            rep.checked += 1
            got = cat.mu((u_tgt, x))
            sign = -1 if g.degree % 2 else 1
            if set(got) != {x} or not _is_one(got[x], sign):
                rep.violations.append(f"mu2({u_tgt},{x}) = {_fmt(got)}, expected {'-' if sign < 0 else ''}{x}")
    for inputs, entries in sorted(cat._by_inputs.items()):
        if len(inputs) >= 3 and unit_ids.intersection(inputs):
            rep.checked += 1
            got = cat.mu(inputs)
            if got:
                rep.violations.append(f"mu{len(inputs)}{inputs} = {_fmt(got)} must vanish (unit input)")
        if len(inputs) == 1 and inputs[0] in unit_ids:
            rep.checked += 1
            got = cat.mu(inputs)
            if got:
                rep.violations.append(f"mu1({inputs[0]}) = {_fmt(got)} must vanish on a unit")
    return rep


def _is_one(c, sign: int) -> bool:
    try:
        return c == sign
    except TypeError:
        return False


def _fmt(d: Dict) -> str:
    if not d:
        return "0"
    return " + ".join(f"({v})*{k}" for k, v in sorted(d.items()))


# ---------------------------------------------------------------- fixtures

def category_to_dict(cat: AInfCategory) -> dict:
    return {
        "name": cat.name,
        "grading": cat.grading,
        "objects": list(cat.objects),
        "generators": [{"id": g.id, "source": g.source, "target": g.target, "degree": g.degree}
                       for g in cat.generators.values()],
        "units": dict(cat.units),
        "mu": [{"k": e.k, "inputs": list(e.inputs), "output": e.output,
                "coefficient": format_novikov(e.coefficient)} for e in cat.entries],
    }


def dumps_category(cat: AInfCategory) -> str:
    return json.dumps(category_to_dict(cat), indent=2, ensure_ascii=False) + "\n"


def category_from_dict(data: dict, source: Optional[str] = None) -> AInfCategory:
    try:
        objects = data["objects"]
        gens = [Generator(str(g["id"]), g["source"], g["target"], int(g["degree"]))
                for g in data["generators"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed category header: {exc}", source) from None
    try:
        cat = AInfCategory(objects, gens, data.get("grading", "z"), data.get("units") or {},
                           data.get("name", ""))
    except UnknownObject as exc:
        raise ValidationError(str(exc), source) from None
    except ValidationError as exc:
        raise ValidationError(str(exc), source) from None
    for i, m in enumerate(data.get("mu", [])):
        pos = f"mu[{i}]"
        try:
            inputs = [str(x) for x in m["inputs"]]
            if "k" in m and int(m["k"]) != len(inputs):
                raise ValidationError(f"k = {m['k']} but {len(inputs)} inputs", source, pos)
            coef = parse_novikov(str(m["coefficient"]), source)
            cat.add_mu(inputs, str(m["output"]), coef)
        except ParseError as exc:
            raise ValidationError(f"coefficient: {exc}", source, pos) from None
        except (NonComposable, KeyError, TypeError) as exc:
            raise ValidationError(f"{exc}", source, pos) from None
        except ValidationError as exc:
            if exc.position:
                raise
            raise ValidationError(str(exc), source, pos) from None
    return cat


def loads_category(text: str, source: Optional[str] = None) -> AInfCategory:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", text, exc.pos, source) from None
    return category_from_dict(data, source)


def load_category(path: str) -> AInfCategory:
    with open(path, encoding="utf-8") as fh:
        return loads_category(fh.read(), path)
