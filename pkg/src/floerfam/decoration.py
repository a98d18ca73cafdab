"""Lattice decorations of structure constants and twisted evaluation of mu.

A decoration attaches to every mu entry (inputs, output, ordinal) one
vector w_j in Z^n per input slot: the boundary class running from input j
to the output.  When each input carries a "jump" character tau_j (the
ratio of the local systems at its two ends) the entry is weighted by
prod_j tau_j^{w_j}.  A single jump on a bimodule element gives the local
system family; several jumps give the category of objects twisted by
local systems, on which all group-like and stabilizer computations run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from .ainf_core import AInfCategory, ValidationError, add_into
from .novikov import NovikovScalar, ParseError
from .torus_ring import LaurentElement, TorusPoint


class Decoration:
    """Slot vectors per mu entry; missing entries are zero."""

    def __init__(self, rank: int, slots: Optional[Dict[Tuple, Tuple[Tuple[int, ...], ...]]] = None):
        self.rank = rank
        self.slots: Dict[Tuple, Tuple[Tuple[int, ...], ...]] = {}
        for addr, vecs in (slots or {}).items():
            self.set(addr, vecs)

    def set(self, address: Tuple, vectors: Sequence[Sequence[int]]) -> None:
        inputs, output, ordinal = address
        vecs = tuple(tuple(int(x) for x in v) for v in vectors)
        if len(vecs) != len(inputs):
            raise ValidationError(f"decoration of {address} needs {len(inputs)} slot vectors")
        for v in vecs:
            if len(v) != self.rank:
                raise ValidationError(f"decoration vector {v} has length != {self.rank}")
        if all(not any(v) for v in vecs):
            self.slots.pop((tuple(inputs), output, ordinal), None)
        else:
            self.slots[(tuple(inputs), output, ordinal)] = vecs

    def get(self, address: Tuple) -> Optional[Tuple[Tuple[int, ...], ...]]:
        return self.slots.get(address)

    def is_zero(self) -> bool:
        return not self.slots

    def validate_against(self, cat: AInfCategory, source: Optional[str] = None) -> None:
        known = {e.address for e in cat.entries}
        for i, addr in enumerate(sorted(self.slots, key=str)):
            if addr not in known:
                raise ValidationError(f"decoration refers to missing mu entry {addr}", source, f"entries[{i}]")

    def to_dict(self) -> dict:
        return {"lattice_rank": self.rank,
                "entries": [{"inputs": list(a[0]), "output": a[1], "ordinal": a[2],
                             "slots": [list(v) for v in vecs]}
                            for a, vecs in self.slots.items()]}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @staticmethod
    def from_dict(data: dict, source: Optional[str] = None) -> "Decoration":
        try:
            rank = int(data["lattice_rank"])
        except (KeyError, TypeError, ValueError):
            raise ValidationError("decoration needs an integer lattice_rank", source) from None
        deco = Decoration(rank)
        for i, e in enumerate(data.get("entries", [])):
            try:
                deco.set((tuple(str(x) for x in e["inputs"]), str(e["output"]), int(e.get("ordinal", 0))),
                         e["slots"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ValidationError(str(exc), source, f"entries[{i}]") from None
        return deco

    @staticmethod
    def loads(text: str, source: Optional[str] = None) -> "Decoration":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", text, exc.pos, source) from None
        return Decoration.from_dict(data, source)

    @staticmethod
    def load(path: str) -> "Decoration":
        with open(path, encoding="utf-8") as fh:
            return Decoration.loads(fh.read(), path)


# ------------------------------------------------------------------ jumps

class Character:
    """A character of the lattice: w -> value in a coefficient ring."""

    def power(self, w: Sequence[int]):
        raise NotImplementedError

    def is_trivial(self) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class PointCharacter(Character):
    """w -> p^w for a torus point p."""
    point: TorusPoint

    def power(self, w):
        return self.point.monomial(w)

    def is_trivial(self) -> bool:
        return self.point.is_identity()

    def __mul__(self, other: "PointCharacter") -> "PointCharacter":
        return PointCharacter(self.point * other.point)

    def inverse(self) -> "PointCharacter":
        return PointCharacter(self.point.inverse())

    def __str__(self):
        return str(self.point)


@dataclass(frozen=True)
class SymbolicCharacter(Character):
    """w -> z^{M w} in a Laurent ring of rank len(M)."""
    matrix: Tuple[Tuple[int, ...], ...]

    @staticmethod
    def generic(n: int) -> "SymbolicCharacter":
        """The tautological character z of the rank-n torus."""
        return SymbolicCharacter(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @staticmethod
    def block(n: int, index: int, blocks: int) -> "SymbolicCharacter":
        rows = []
        for b in range(blocks):
            for i in range(n):
                rows.append(tuple(int(b == index and i == j) for j in range(n)))
        return SymbolicCharacter(tuple(rows))

    @property
    def ring_rank(self) -> int:
        return len(self.matrix)

    def power(self, w):
        v = tuple(sum(r * x for r, x in zip(row, w)) for row in self.matrix)
        return LaurentElement.monomial(v, 1, len(self.matrix))

    def is_trivial(self) -> bool:
        return all(not any(row) for row in self.matrix)

    def __mul__(self, other: "SymbolicCharacter") -> "SymbolicCharacter":
        return SymbolicCharacter(tuple(tuple(a + b for a, b in zip(r1, r2))
                                       for r1, r2 in zip(self.matrix, other.matrix)))

    def inverse(self) -> "SymbolicCharacter":
        return SymbolicCharacter(tuple(tuple(-a for a in row) for row in self.matrix))

    def __str__(self):
        return "z^" + str([list(r) for r in self.matrix])


def trivial_like(ch: Character) -> Character:
    if isinstance(ch, PointCharacter):
        return PointCharacter(TorusPoint.identity(ch.point.n))
    if isinstance(ch, SymbolicCharacter):
        return SymbolicCharacter(tuple(tuple(0 for _ in row) for row in ch.matrix))
    raise TypeError(ch)


def multiply(a: Optional[Character], b: Optional[Character]) -> Optional[Character]:
    if a is None:
        return b
    if b is None:
        return a
    return a * b


class DecoratedCategory:
    """Base category plus decoration; evaluates mu with jump characters."""

    def __init__(self, cat: AInfCategory, deco: Optional[Decoration] = None, rank: Optional[int] = None):
        self.cat = cat
        if deco is None:
            deco = Decoration(rank if rank is not None else 0)
        self.deco = deco
        self._cache: Dict = {}

    @property
    def rank(self) -> int:
        return self.deco.rank

    def twisted_mu(self, inputs: Tuple[str, ...], jumps: Tuple[Optional[Character], ...]) -> Dict:
        """mu(inputs) with each entry weighted by prod_j jumps[j]^{w_j}."""
        if all(j is None for j in jumps):
            return self.cat.mu(inputs)
        key = (inputs, jumps)
        got = self._cache.get(key)
        if got is not None:
            return got
        out: Dict = {}
        for e in self.cat.mu_entries(inputs):
            coef = e.coefficient
            vecs = self.deco.get(e.address)
            if vecs is not None:
                for ch, w in zip(jumps, vecs):
                    if ch is not None and any(w):
                        coef = coef * ch.power(w)
            add_into(out, e.output, coef)
        ring = next((j.ring_rank for j in jumps if isinstance(j, SymbolicCharacter)), None)
        if ring is not None:
            out = {k: v if isinstance(v, LaurentElement) else LaurentElement.constant(v, ring)
                   for k, v in out.items()}
        if len(self._cache) < 200000:
            self._cache[key] = out
        return out


def extension_op(dcat: DecoratedCategory):
    """Structure map on strings of (generator, jump) pairs in the twisted category."""

    def op(string):
        gens = tuple(g for g, _ in string)
        jumps = tuple(j for _, j in string)
        total = None
        for j in jumps:
            total = multiply(total, j)
        got = dcat.twisted_mu(gens, jumps)
        return {(y, total): c for y, c in got.items()}

    return op


def check_extension_relations(dcat: DecoratedCategory, max_inputs: int):
    """A-infinity relations of the twisted category with independent jumps on every input.

    This is the cocycle condition on a decoration: it holds iff the
    decorated relations cancel for arbitrary local systems on all objects.
    """
    from .ainf_core import RelationFailure, RelationReport, block_relation
    cat = dcat.cat
    n = dcat.rank
    op = extension_op(dcat)

    def sdeg(el):
        return cat.sdeg(el[0])

    report = RelationReport(0, max_length=max_inputs)
    for length in range(1, max_inputs + 1):
        jumps = tuple(SymbolicCharacter.block(n, i, length) for i in range(length))
        for s in cat.strings(length):
            report.checked += 1
            res = block_relation(tuple(zip(s, jumps)), op, sdeg)
            if res:
                report.failures.append(RelationFailure(s, {y: v for (y, _), v in res.items()}))
    return report
