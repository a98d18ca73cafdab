"""Finite free cochain complexes with sparse differentials, and their ranks."""

from __future__ import annotations

from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence

from . import linalg
from .novikov import NovikovScalar
from .torus_ring import LaurentElement, TorusPoint, eval_at_point


class FiniteComplex:
    """Basis with integer degrees and d stored by columns: ``d[x] = {y: coefficient}``.

    d raises degree by one.  In ``z2`` mode degrees are read mod 2 and
    only total cohomology is meaningful.
    """

    def __init__(self, basis: Sequence[Hashable], degrees: Dict[Hashable, int],
                 d: Dict[Hashable, Dict[Hashable, object]], grading: str = "z",
                 ring_rank: Optional[int] = None, name: str = ""):
        self.basis = list(basis)
        self.degrees = {b: (degrees[b] % 2 if grading == "z2" else degrees[b]) for b in self.basis}
        self.d = {x: {y: c for y, c in col.items() if not c.is_zero()} for x, col in d.items()}
        self.d = {x: col for x, col in self.d.items() if col}
        self.grading = grading
        self.ring_rank = ring_rank
        self.name = name

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_laurent(self) -> bool:
        return any(isinstance(c, LaurentElement) for col in self.d.values() for c in col.values())

    def degree_list(self) -> List[int]:
        return sorted(set(self.degrees.values()))

    def specialize(self, p: TorusPoint) -> "FiniteComplex":
        d = {x: {y: (eval_at_point(c, p) if isinstance(c, LaurentElement) else c) for y, c in col.items()}
             for x, col in self.d.items()}
        return FiniteComplex(self.basis, self.degrees, d, self.grading, None, f"{self.name}|{p}")

    def map_entries(self, fn: Callable) -> "FiniteComplex":
        d = {x: {y: fn(c) for y, c in col.items()} for x, col in self.d.items()}
        return FiniteComplex(self.basis, self.degrees, d, self.grading, self.ring_rank, self.name)

    def restrict(self, keep: set) -> "FiniteComplex":
        """Subcomplex on ``keep`` (which must be closed under d)."""
        basis = [b for b in self.basis if b in keep]
        d = {x: {y: c for y, c in self.d.get(x, {}).items() if y in keep} for x in basis}
        return FiniteComplex(basis, {b: self.degrees[b] for b in basis}, d, self.grading,
                             self.ring_rank, self.name)

    def d_squared(self) -> Dict:
        """Nonzero entries of d o d (empty means d^2 = 0)."""
        out: Dict = {}
        for x, col in self.d.items():
            acc: Dict = {}
            for y, c in col.items():
                for z, c2 in self.d.get(y, {}).items():
                    v = c * c2
                    cur = acc.get(z)
                    acc[z] = v if cur is None else cur + v
            acc = {z: v for z, v in acc.items() if not v.is_zero()}
            if acc:
                out[x] = acc
        return out

    def block(self, k: int, cols: Optional[Iterable] = None, rows: Optional[set] = None) -> Dict:
        """Columns of degree k (as a dict col -> {row: c}), optionally restricted."""
        cols = [b for b in self.basis if self.degrees[b] == k] if cols is None else cols
        out = {}
        for x in cols:
            col = self.d.get(x)
            if not col:
                continue
            if rows is not None:
                col = {y: c for y, c in col.items() if y in rows}
            if col:
                out[x] = col
        return out

    def rank_d(self, k: Optional[int] = None) -> int:
        if k is None:
            return linalg.rank(self.d)
        return linalg.rank(self.block(k))

    def cohomology(self) -> Dict[int, int]:
        """Per-degree cohomology dimensions over a field (entries must be scalars)."""
        self._require_scalar()
        if self.grading == "z2":
            return {"total": self.dim - 2 * self.rank_d()}
        ranks = {k: self.rank_d(k) for k in self.degree_list()}
        out = {}
        for k in self.degree_list():
            dim_k = sum(1 for b in self.basis if self.degrees[b] == k)
            out[k] = dim_k - ranks[k] - ranks.get(k - 1, 0)
        return out

    def total_cohomology(self) -> int:
        self._require_scalar()
        return self.dim - 2 * self.rank_d()

    def _require_scalar(self):
        if self.is_laurent():
            raise TypeError("specialize the complex at a point before taking ranks")


def stable_cohomology(big: FiniteComplex, small: set) -> Dict:
    """Dimension of the image of H(A) -> H(B) for the subcomplex A spanned by ``small``.

    image = dim Z_A - rank d_B + rank d_Q, with Q = B / A, in each degree
    (the d_B and d_Q ranks taken from the previous degree).  In ``z2`` mode
    the single total count is returned under the key "total".
    """
    qset = {b for b in big.basis if b not in small}
    a_basis = [b for b in big.basis if b in small]
    if big.grading == "z2":
        d_a = {x: {y: c for y, c in big.d.get(x, {}).items()} for x in a_basis}
        d_q = {x: {y: c for y, c in big.d.get(x, {}).items() if y in qset} for x in qset}
        val = len(a_basis) - linalg.rank(d_a) - linalg.rank(big.d) + linalg.rank(d_q)
        return {"total": val}
    out = {}
    for k in big.degree_list():
        ak = [b for b in a_basis if big.degrees[b] == k]
        rank_a = linalg.rank(big.block(k, ak))
        prev = [b for b in big.basis if big.degrees[b] == k - 1]
        rank_b = linalg.rank(big.block(k - 1, prev))
        rank_q = linalg.rank(big.block(k - 1, [b for b in prev if b in qset], qset))
        out[k] = len(ak) - rank_a - rank_b + rank_q
    return out


def total(ranks: Dict) -> int:
    return sum(ranks.values())


def cone_complex(src: FiniteComplex, tgt: FiniteComplex, fmap: Dict[Hashable, Dict],
                 map_degree: int = 1, name: str = "") -> FiniteComplex:
    """Cone of a chain map given by columns ``fmap[x] = {y: c}``.

    The map must raise degree by ``map_degree`` and anticommute with d
    when the degree is odd, commute when it is even (the parity twist
    x -> (-1)^{|x|} x is applied in the even case).
    """
    basis = [("src", b) for b in src.basis] + [("tgt", b) for b in tgt.basis]
    degrees = {("src", b): src.degrees[b] + map_degree - 1 for b in src.basis}
    degrees.update({("tgt", b): tgt.degrees[b] for b in tgt.basis})
    d: Dict = {}
    for b in src.basis:
        col = {("src", y): c for y, c in src.d.get(b, {}).items()}
        twist = map_degree % 2 == 0 and src.degrees[b] % 2 == 1
        for y, c in fmap.get(b, {}).items():
            col[("tgt", y)] = -c if twist else c
        d[("src", b)] = col
    for b in tgt.basis:
        d[("tgt", b)] = {("tgt", y): c for y, c in tgt.d.get(b, {}).items()}
    grading = "z2" if "z2" in (src.grading, tgt.grading) else "z"
    return FiniteComplex(basis, degrees, d, grading, src.ring_rank, name)


def induced_rank(src: FiniteComplex, tgt: FiniteComplex, cone: FiniteComplex) -> int:
    """Rank of H(f) from total cohomology: (dim H(src) + dim H(tgt) - dim H(cone)) / 2."""
    val = src.total_cohomology() + tgt.total_cohomology() - cone.total_cohomology()
    assert val % 2 == 0
    return val // 2
