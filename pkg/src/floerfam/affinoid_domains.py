"""Polytopes in valuation space, tropical norms, and shrinking to invertibility.

A torus point x with val(x) = nu has |f(x)| = e^{-val f(x)}, and
val f(x) >= min_v (val a_v + <nu, v>), with equality when the minimum is
attained by a single support vector.  Everything here runs on that fact.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .complexes import FiniteComplex
from .novikov import NovikovScalar, to_fraction
from .sheaf_analysis import laurent_complex, rank_at_point, rank_stratification
from .torus_ring import LaurentElement, TorusPoint

__all__ = ["EmptyPolytope", "NotInterior", "Unbounded", "Refusal", "TiedLeadingTerms",
           "SampledPointNotAcyclic", "Polytope", "TropicalEnvelope", "tropical_envelope", "SupNorm",
           "sup_norm_over_polytope", "shrink_polytope_invertibility", "ShrinkResult",
           "semicontinuity_shrink", "SemicontinuityResult", "point_over", "BISECTION_STEPS"]

BISECTION_STEPS = 20


class EmptyPolytope(ValueError):
    pass


class NotInterior(ValueError):
    pass


class Unbounded(ValueError):
    pass


class Refusal(Exception):
    """The sufficient criterion does not apply; ``diagnostics`` says why."""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class TiedLeadingTerms(Refusal):
    pass


class SampledPointNotAcyclic(Exception):
    def __init__(self, message: str, point: TorusPoint, ranks: Dict):
        super().__init__(message)
        self.point = point
        self.ranks = ranks


Vector = Tuple[Fraction, ...]


def _dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


# ---------------------------------------------------------------- polytopes

class Polytope:
    """{nu : <nu, v_i> <= a_i} with integer normals and rational bounds."""

    def __init__(self, halfspaces: Sequence[Tuple[Sequence[int], object]], n: Optional[int] = None):
        hs = []
        for v, a in halfspaces:
            hs.append((tuple(int(x) for x in v), to_fraction(a)))
        if n is None:
            if not hs:
                raise ValueError("a polytope needs halfspaces or an explicit dimension")
            n = len(hs[0][0])
        for v, _ in hs:
            if len(v) != n:
                raise ValueError(f"normal {v} has the wrong length for dimension {n}")
        self.n = n
        self.halfspaces = hs
        self._vertices: Optional[List[Vector]] = None

    @staticmethod
    def box(lows: Sequence, highs: Sequence) -> "Polytope":
        n = len(lows)
        hs = []
        for i in range(n):
            e = [0] * n
            e[i] = 1
            hs.append((tuple(e), highs[i]))
            e[i] = -1
            hs.append((tuple(e), -to_fraction(lows[i])))
        return Polytope(hs, n)

    def contains(self, nu: Sequence) -> bool:
        return all(_dot(nu, v) <= a for v, a in self.halfspaces)

    def is_bounded(self) -> bool:
        """The recession cone {d : <d, v_i> <= 0} is zero.

        With normals of full rank the cone is pointed, so if it is nonzero
        it has an extreme ray cut out by n - 1 independent tight normals.
        """
        normals = [[Fraction(x) for x in v] for v, _ in self.halfspaces]
        if linalg.rational_rank(normals) < self.n:
            return False
        for rows in itertools.combinations(normals, self.n - 1):
            null = linalg.rational_nullspace(list(rows), self.n)
            if len(null) != 1:
                continue
            for d in (null[0], [-x for x in null[0]]):
                if all(_dot(d, v) <= 0 for v in normals):
                    return False
        return True

    def vertices(self) -> List[Vector]:
        if self._vertices is None:
            if not self.is_bounded():
                raise Unbounded("polytope is unbounded")
            found = set()
            for combo in itertools.combinations(self.halfspaces, self.n):
                a = [[Fraction(x) for x in v] for v, _ in combo]
                b = [bnd for _, bnd in combo]
                sol = linalg.rational_solve(a, b)
                if sol is not None and self.contains(sol):
                    found.add(tuple(sol))
            self._vertices = sorted(found)
        return self._vertices

    def require_nonempty(self):
        if not self.vertices():
            raise EmptyPolytope("polytope has no points")

    def has_interior_origin(self) -> bool:
        return all(a > 0 for _, a in self.halfspaces)

    def scaled(self, delta) -> "Polytope":
        delta = to_fraction(delta)
        return Polytope([(v, a * delta) for v, a in self.halfspaces], self.n)

    def intersect(self, other: "Polytope") -> "Polytope":
        return Polytope(self.halfspaces + other.halfspaces, self.n)

    def random_point(self, rng: random.Random) -> Vector:
        vs = self.vertices()
        if not vs:
            raise EmptyPolytope("polytope has no points")
        w = [Fraction(rng.randint(0, 12)) for _ in vs]
        if not any(w):
            w[0] = Fraction(1)
        tot = sum(w)
        return tuple(sum((wi * v[i] for wi, v in zip(w, vs)), Fraction(0)) / tot for i in range(self.n))

    def to_dict(self) -> dict:
        return {"dimension": self.n,
                "halfspaces": [{"normal": list(v), "bound": str(a)} for v, a in self.halfspaces],
                "vertices": [[str(x) for x in p] for p in self.vertices()]}

    @staticmethod
    def from_dict(data: dict, source: Optional[str] = None) -> "Polytope":
        from .ainf_core import ValidationError
        where = f"{source}: " if source else ""
        try:
            hs = [(row["normal"], row["bound"]) for row in data["halfspaces"]]
            P = Polytope(hs, data.get("dimension"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{where}bad polytope: {exc}") from exc
        if "vertices" in data:
            cached = sorted(tuple(to_fraction(x) for x in p) for p in data["vertices"])
            if cached != P.vertices():
                raise ValidationError(f"{where}cached vertices do not match the halfspaces")
        return P

    def __eq__(self, other):
        return isinstance(other, Polytope) and self.n == other.n and self.vertices() == other.vertices()

    def __repr__(self):
        return f"Polytope({[(v, str(a)) for v, a in self.halfspaces]})"


# ------------------------------------------------------------ envelopes

@dataclass
class TropicalEnvelope:
    """nu -> min_v (val a_v + <nu, v>) over the support of f."""
    n: int
    pieces: List[Tuple[Vector, Fraction]]

    def value(self, nu: Sequence) -> Fraction:
        return min(c + _dot(nu, v) for v, c in self.pieces)

    def argmin(self, nu: Sequence) -> List[Vector]:
        m = self.value(nu)
        return [v for v, c in self.pieces if c + _dot(nu, v) == m]

    def margin(self, nu: Sequence, v_star: Vector) -> Optional[Fraction]:
        """Gap between the v* piece and the next one at nu (None with a single piece)."""
        star = next(c for v, c in self.pieces if v == v_star) + _dot(nu, v_star)
        others = [c + _dot(nu, v) for v, c in self.pieces if v != v_star]
        return min(others) - star if others else None

    def breakpoints(self) -> List[Fraction]:
        """n = 1 only: the points where the minimum switches pieces."""
        if self.n != 1:
            raise ValueError("breakpoints are listed for one variable only")
        out = set()
        for (v1, c1), (v2, c2) in itertools.combinations(self.pieces, 2):
            if v1[0] == v2[0]:
                continue
            t = (c2 - c1) / (v1[0] - v2[0])
            if len(self.argmin((t,))) >= 2:
                out.add(t)
        return sorted(out)

    def as_dict(self) -> dict:
        out = {"pieces": [{"vector": [str(x) for x in v], "valuation": str(c)} for v, c in self.pieces]}
        if self.n == 1:
            out["breakpoints"] = [str(t) for t in self.breakpoints()]
        return out


def tropical_envelope(f: LaurentElement) -> TropicalEnvelope:
    if f.is_zero():
        raise ValueError("the zero element has no envelope")
    pieces = []
    for v, a in sorted(f.terms.items()):
        if not a.terms:
            raise ValueError(f"coefficient {a} has no leading term")
        pieces.append((tuple(Fraction(x) for x in v), a.terms[0][0]))
    return TropicalEnvelope(f.n, pieces)


@dataclass
class SupNorm:
    exponent: Fraction          # the norm is e^{-exponent}
    vertex: Vector
    tail_dominated: Optional[bool] = None

    @property
    def value(self) -> float:
        return math.exp(-float(self.exponent))

    def as_dict(self) -> dict:
        out = {"norm": f"e^(-({self.exponent}))", "exponent": str(self.exponent),
               "vertex": [str(x) for x in self.vertex]}
        if self.tail_dominated is not None:
            out["tail_dominated"] = self.tail_dominated
        return out


def sup_norm_over_polytope(f: LaurentElement, P: Polytope, tail_bound=None) -> SupNorm:
    """sup over S_P of |f| = e^{-q}, q the least envelope value over the vertices.

    The envelope is concave, so its minimum over P sits at a vertex.  With
    ``tail_bound`` (a lower bound for the valuation of an omitted tail on
    P) the result also says whether the tail is strictly dominated.
    """
    P.require_nonempty()
    env = tropical_envelope(f)
    best = None
    for vx in P.vertices():
        q = env.value(vx)
        if best is None or q < best[0]:
            best = (q, vx)
    out = SupNorm(best[0], best[1])
    if tail_bound is not None:
        out.tail_dominated = best[0] < to_fraction(tail_bound)
    return out


# -------------------------------------------------------------- shrinking

@dataclass
class ShrinkResult:
    polytope: Polytope
    delta: Fraction
    leading: Vector
    margin: Fraction
    steps: int

    def as_dict(self) -> dict:
        return {"delta": str(self.delta), "leading_vector": [str(x) for x in self.leading],
                "margin": str(self.margin), "bisection_steps": self.steps,
                "polytope": self.polytope.to_dict()}


def _dominates(env: TropicalEnvelope, v_star: Vector, P: Polytope, m: Fraction) -> bool:
    # the v* piece is below every other piece by at least m (and by more than 0),
    # and its value stays <= m so that |f| >= e^{-m}; all conditions are
    # concave or affine in nu, so vertices suffice
    for vx in P.vertices():
        gap = env.margin(vx, v_star)
        if gap is not None and (gap <= 0 or gap < m):
            return False
        if env.value(vx) > m:
            return False
    return True


def shrink_polytope_invertibility(f: LaurentElement, P: Polytope, eps_exponent=0) -> ShrinkResult:
    """Largest delta P (delta found by bisection) on which |f| >= e^{-eps_exponent} via one leading term.

    The leading term is the unique minimizer of the envelope at nu = 0;
    a tie there is refused.
    """
    m = to_fraction(eps_exponent)
    if not P.has_interior_origin():
        raise NotInterior("0 is not in the interior of the polytope")
    P.require_nonempty()
    env = tropical_envelope(f)
    zero = (Fraction(0),) * P.n
    lead = env.argmin(zero)
    if len(lead) > 1:
        raise TiedLeadingTerms("envelope minimum at 0 is attained by several terms",
                               {"tied_vectors": [[str(x) for x in v] for v in lead],
                                "value_at_0": str(env.value(zero))})
    v_star = lead[0]
    gap0 = env.margin(zero, v_star)
    diag = {"leading_vector": [str(x) for x in v_star], "margin_at_0": None if gap0 is None else str(gap0),
            "leading_value_at_0": str(env.value(zero)), "eps_exponent": str(m)}
    if (gap0 is not None and gap0 < m) or env.value(zero) > m:
        raise Refusal("the leading term does not clear the requested bound even at nu = 0", diag)
    if _dominates(env, v_star, P, m):
        return ShrinkResult(P, Fraction(1), v_star, m, 0)
    lo, hi = Fraction(0), Fraction(1)
    steps = 0
    for _ in range(BISECTION_STEPS):
        steps += 1
        mid = (lo + hi) / 2
        if _dominates(env, v_star, P.scaled(mid), m):
            lo = mid
        else:
            hi = mid
    if lo == 0:
        raise Refusal(f"no admissible homothety found in {BISECTION_STEPS} bisection steps", diag)
    return ShrinkResult(P.scaled(lo), lo, v_star, m, steps)


def point_over(nu: Sequence, unit: Sequence) -> TorusPoint:
    """The torus point with valuation nu and unitary part ``unit``."""
    return TorusPoint(tuple(NovikovScalar.monomial(to_fraction(u), to_fraction(x)) for x, u in zip(nu, unit)))


def _random_unit(rng: random.Random, n: int) -> List[Fraction]:
    return [Fraction(rng.choice([-3, -2, -1, 1, 2, 3, 5]), rng.choice([1, 2, 3])) for _ in range(n)]


# -------------------------------------------------------- semicontinuity

@dataclass
class SemicontinuityResult:
    polytope: Polytope
    delta: Fraction
    certificates: List[Dict]
    sampled_unitary: List[str]
    validation: List[Dict] = field(default_factory=list)

    @property
    def validated(self) -> bool:
        return all(v["acyclic"] for v in self.validation)

    def as_dict(self) -> dict:
        return {"delta": str(self.delta), "polytope": self.polytope.to_dict(),
                "certificates": self.certificates, "sampled_unitary": self.sampled_unitary,
                "validation": self.validation, "validated": self.validated}


def _acyclic(ranks: Dict) -> bool:
    return all(v == 0 for v in ranks.values())


def semicontinuity_shrink(C: FiniteComplex, P: Polytope, samples: int = 20, seed: int = 0,
                          include_identity: bool = True, eps_exponent=0,
                          validate: int = 20) -> SemicontinuityResult:
    """Shrink P so that C stays acyclic over S_{P'}, from acyclicity on sampled unitary points.

    One maximal minor per block with a unique leading term suffices: its
    shrink keeps it invertible, so the block keeps full rank on S_{P'}.
    """
    n = P.n
    C = laurent_complex(C, n)
    if C.d_squared():
        raise ValueError("d^2 != 0")
    rng = random.Random(seed)
    pts = [TorusPoint.identity(n)] if include_identity else []
    while len(pts) < samples:
        u = _random_unit(rng, n)
        if include_identity or any(x != 1 for x in u):
            pts.append(point_over((0,) * n, u))
    for p in pts:
        ranks = rank_at_point(C, p)
        if not _acyclic(ranks):
            raise SampledPointNotAcyclic(f"C is not acyclic at the unitary point {p}", p, ranks)
    strat = rank_stratification(C, n)
    certs = []
    delta = Fraction(1)
    refusals = []
    for b in strat.blocks:
        if b.generic_rank == 0:
            continue
        if b.method != "minors":
            raise Refusal(f"block {b.degree} exceeds the minor cap", {"block": str(b.degree)})
        best = None
        for f in b.ideals[b.generic_rank]:
            try:
                res = shrink_polytope_invertibility(f, P, eps_exponent)
            except Refusal as exc:
                refusals.append({"block": str(b.degree), "minor": str(f), "reason": str(exc),
                                 "diagnostics": exc.diagnostics})
                continue
            if best is None or res.delta > best[1].delta:
                best = (f, res)
        if best is None:
            diag = {"minors": refusals, "sampled_unitary": [str(p) for p in pts]}
            if all(r["reason"].startswith("envelope minimum") for r in refusals):
                raise TiedLeadingTerms("every maximal minor has tied leading terms at nu = 0", diag)
            raise Refusal("no maximal minor admits a leading-term shrink", diag)
        f, res = best
        certs.append({"block": str(b.degree), "rank": b.generic_rank, "minor": str(f),
                      "delta": str(res.delta), "leading_vector": [str(x) for x in res.leading]})
        delta = min(delta, res.delta)
    out = SemicontinuityResult(P.scaled(delta), delta, certs, [str(p) for p in pts])
    vrng = random.Random(seed + 1)
    for _ in range(validate):
        nu = out.polytope.random_point(vrng)
        p = point_over(nu, _random_unit(vrng, n))
        ranks = rank_at_point(C, p)
        out.validation.append({"point": str(p), "acyclic": _acyclic(ranks)})
    return out
