"""Laurent rings over the Novikov field, torus points and exponential zeros."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .novikov import (ExpressionEvaluator, GaussianRational, NovikovScalar, ParseError,
                      ZeroWithinPrecision, parse_novikov, scalar_names, to_fraction, _BigO)


class ZeroInput(ValueError):
    pass


class IrrationalBreakpoint(ValueError):
    pass


Exponent = Tuple  # tuple of int (lattice) or (Fraction,) for the real-exponent ring


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


class LaurentElement:
    """Finitely supported sum of a_v z^v with Novikov coefficients.

    ``n`` is the lattice rank.  With ``real=True`` the ring is the n = 1
    ring with rational exponents.
    """

    __slots__ = ("n", "real", "terms")

    def __init__(self, n: int, terms: Optional[dict] = None, real: bool = False):
        self.n = n
        self.real = real
        clean = {}
        for v, a in (terms or {}).items():
            v = self._key(v)
            a = NovikovScalar.coerce(a)
            if v in clean:
                a = clean[v] + a
            clean[v] = a
        self.terms = {v: a for v, a in clean.items() if not a.is_zero()}

    def _key(self, v):
        if self.real:
            if not isinstance(v, tuple):
                v = (v,)
            if len(v) != 1:
                raise ValueError("real-exponent ring has rank 1")
            return (to_fraction(v[0]),)
        if not isinstance(v, tuple):
            v = (v,)
        if len(v) != self.n:
            raise ValueError(f"exponent {v} has wrong length for rank {self.n}")
        out = []
        for x in v:
            x = to_fraction(x) if not isinstance(x, int) else x
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"lattice exponent {x} is not an integer")
                x = int(x)
            out.append(x)
        return tuple(out)

    @staticmethod
    def _raw(n, terms, real=False):
        e = object.__new__(LaurentElement)
        e.n = n
        e.real = real
        e.terms = terms
        return e

    # constructors
    @staticmethod
    def zero(n: int, real: bool = False) -> "LaurentElement":
        return LaurentElement._raw(n, {}, real)

    @staticmethod
    def constant(c, n: int, real: bool = False) -> "LaurentElement":
        c = NovikovScalar.coerce(c)
        key = (Fraction(0),) if real else (0,) * n
        return LaurentElement._raw(n, {} if c.is_zero() else {key: c}, real)

    @staticmethod
    def one(n: int, real: bool = False) -> "LaurentElement":
        return LaurentElement.constant(NovikovScalar.one(), n, real)

    @staticmethod
    def monomial(v, coef=1, n: Optional[int] = None, real: bool = False) -> "LaurentElement":
        if not isinstance(v, tuple):
            v = (v,)
        n = len(v) if n is None else n
        return LaurentElement(n, {v: NovikovScalar.coerce(coef)}, real)

    @staticmethod
    def variable(i: int, n: int) -> "LaurentElement":
        v = tuple(1 if j == i else 0 for j in range(n))
        return LaurentElement._raw(n, {v: NovikovScalar.one()}, False)

    def same_ring(self, other) -> "LaurentElement":
        if isinstance(other, LaurentElement):
            if other.n != self.n or other.real != self.real:
                raise ValueError("elements of different Laurent rings")
            return other
        if isinstance(other, (int, Fraction, GaussianRational, NovikovScalar)):
            return LaurentElement.constant(other, self.n, self.real)
        raise TypeError(f"cannot combine LaurentElement with {type(other).__name__}")

    # predicates
    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return all(all(x == 0 for x in v) for v in self.terms)

    def constant_term(self) -> NovikovScalar:
        key = (Fraction(0),) if self.real else (0,) * self.n
        return self.terms.get(key, NovikovScalar.zero())

    def support(self):
        return sorted(self.terms)

    def coefficient(self, v) -> NovikovScalar:
        return self.terms.get(self._key(v), NovikovScalar.zero())

    # arithmetic
    def __add__(self, other):
        try:
            other = self.same_ring(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for v, a in other.terms.items():
            if v in out:
                s = out[v] + a
                if s.is_zero():
                    del out[v]
                else:
                    out[v] = s
            else:
                out[v] = a
        return LaurentElement._raw(self.n, out, self.real)

    __radd__ = __add__

    def __neg__(self):
        return LaurentElement._raw(self.n, {v: -a for v, a in self.terms.items()}, self.real)

    def __sub__(self, other):
        try:
            other = self.same_ring(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self.same_ring(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, NovikovScalar)):
            c = NovikovScalar.coerce(other)
            if c.is_zero():
                return LaurentElement.zero(self.n, self.real)
            return LaurentElement._raw(
                self.n, {v: a * c for v, a in self.terms.items() if not (a * c).is_zero()},
                self.real)
        if not isinstance(other, LaurentElement):
            return NotImplemented
        self.same_ring(other)
        out: dict = {}
        for v1, a1 in self.terms.items():
            for v2, a2 in other.terms.items():
                v = _add_exp(v1, v2)
                p = a1 * a2
                if v in out:
                    out[v] = out[v] + p
                else:
                    out[v] = p
        return LaurentElement._raw(self.n, {v: a for v, a in out.items() if not a.is_zero()},
                                   self.real)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, NovikovScalar)):
            return self * (1 / NovikovScalar.coerce(other))
        if isinstance(other, LaurentElement) and other.is_monomial():
            (v, a), = other.terms.items()
            inv = LaurentElement._raw(self.n, {tuple(-x for x in v): a.invert()}, self.real)
            return self * inv
        raise ValueError("division only by scalars and monomials")

    def __pow__(self, k):
        if isinstance(k, tuple):
            raise ValueError("tuple exponents apply to the vector variable z only")
        k = to_fraction(k)
        if self.is_monomial():
            (v, a), = self.terms.items()
            if k.denominator != 1:
                if not (self.real and a == 1):
                    raise ValueError("rational powers need a unit-coefficient monomial in z")
                return LaurentElement._raw(self.n, {(v[0] * k,): a}, True)
            k = int(k)
            return LaurentElement._raw(self.n, {tuple(x * k for x in v): a ** k}, self.real)
        if k.denominator != 1 or k < 0:
            raise ValueError("only non-negative integer powers of non-monomials")
        out = LaurentElement.one(self.n, self.real)
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, NovikovScalar)):
            other = LaurentElement.constant(other, self.n, self.real)
        if not isinstance(other, LaurentElement):
            return NotImplemented
        return self.n == other.n and self.real == other.real and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.real, frozenset(self.terms.items())))

    def map_coefficients(self, fn) -> "LaurentElement":
        return LaurentElement(self.n, {v: fn(a) for v, a in self.terms.items()}, self.real)

    def invert_variables(self) -> "LaurentElement":
        """Substitute z -> z^{-1}."""
        return LaurentElement._raw(self.n, {tuple(-x for x in v): a for v, a in self.terms.items()},
                                   self.real)

    def monomial_substitute(self, matrix: Sequence[Sequence[int]]) -> "LaurentElement":
        """z^v -> z^{Mv} for an integer matrix M (rows give new coordinates)."""
        m = len(matrix)
        out = LaurentElement.zero(m)
        for v, a in self.terms.items():
            w = tuple(sum(row[j] * v[j] for j in range(self.n)) for row in matrix)
            out = out + LaurentElement._raw(m, {w: a}, False)
        return out

    def eval_at(self, p: "TorusPoint") -> NovikovScalar:
        return eval_at_point(self, p)

    def __str__(self):
        return format_laurent(self)

    def __repr__(self):
        return f"LaurentElement({format_laurent(self)!r})"


def _fmt_exp(v, real):
    if real:
        return f"({v[0]})"
    return "(" + ",".join(str(x) for x in v) + ")"


def format_laurent(f: LaurentElement) -> str:
    if not f.terms:
        return "0"
    return " + ".join(f"({f.terms[v]})*z^{_fmt_exp(v, f.real)}" for v in sorted(f.terms))


class _ZVector:
    """The vector variable ``z`` inside parsed text; ``z^(a,b)`` is a monomial."""

    def __init__(self, n: int, real: bool):
        self.n = n
        self.real = real

    def __pow__(self, k):
        if isinstance(k, tuple):
            if self.real:
                raise ValueError("tuple exponent in the real-exponent ring")
            return LaurentElement.monomial(k, 1, self.n)
        if self.n != 1:
            raise ValueError("z needs a tuple exponent in rank > 1")
        k = to_fraction(k)
        if not self.real and k.denominator != 1:
            raise ValueError("rational exponent in a lattice ring")
        return LaurentElement.monomial((k,), 1, 1, self.real)

    def _as_element(self):
        if self.n != 1:
            raise ValueError("bare z only in rank 1")
        return LaurentElement.monomial((1,), 1, 1, self.real)

    def __add__(self, o):
        return self._as_element() + o

    def __radd__(self, o):
        return o + self._as_element()

    def __sub__(self, o):
        return self._as_element() - o

    def __rsub__(self, o):
        return self._as_element().__rsub__(o)

    def __mul__(self, o):
        return self._as_element() * o

    def __rmul__(self, o):
        return self._as_element() * o

    def __neg__(self):
        return -self._as_element()

    def __truediv__(self, o):
        return self._as_element() / o

    def __rtruediv__(self, o):
        return LaurentElement.constant(NovikovScalar.coerce(o), 1, self.real) * (self._as_element() ** -1)


def laurent_names(n: int, real: bool = False) -> dict:
    names = scalar_names()
    names["z"] = _ZVector(n, real)
    if not real:
        for i in range(n):
            names[f"z{i + 1}"] = LaurentElement.variable(i, n)
    return names


def parse_laurent(text: str, n: int, real: bool = False, source: Optional[str] = None) -> LaurentElement:
    """Parse Laurent text: canonical ``(a)*z^(v1,...,vn)`` sums or free arithmetic in z, z1..zn, T, i."""
    if text.strip() == "0":
        return LaurentElement.zero(n, real)

    def promote(x):
        return LaurentElement.constant(NovikovScalar.coerce(x), n, real)

    value = ExpressionEvaluator(laurent_names(n, real), promote).evaluate(text, source)
    if isinstance(value, _ZVector):
        try:
            value = value._as_element()
        except ValueError as exc:
            raise ParseError(str(exc), text, None, source) from None
    if isinstance(value, _BigO):
        value = NovikovScalar.zero(value.cutoff)
    if isinstance(value, (Fraction, GaussianRational, NovikovScalar)):
        return LaurentElement.constant(NovikovScalar.coerce(value), n, real)
    if isinstance(value, LaurentElement):
        if value.n != n or value.real != real:
            raise ParseError("element of the wrong ring", text, None, source)
        return value
    raise ParseError(f"{text!r} is not a Laurent element", text, None, source)


# ------------------------------------------------------------ torus points

@dataclass(frozen=True)
class TorusPoint:
    """A point of the torus: n invertible Novikov coordinates."""
    coords: Tuple[NovikovScalar, ...]

    def __post_init__(self):
        coords = tuple(NovikovScalar.coerce(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        for c in coords:
            if not c.terms:
                raise ZeroWithinPrecision(f"torus coordinate {c} is not invertible")

    @property
    def n(self) -> int:
        return len(self.coords)

    @staticmethod
    def identity(n: int) -> "TorusPoint":
        return TorusPoint(tuple(NovikovScalar.one() for _ in range(n)))

    @staticmethod
    def of(*coords) -> "TorusPoint":
        return TorusPoint(tuple(NovikovScalar.coerce(c) for c in coords))

    def valuation_vector(self) -> Tuple[Fraction, ...]:
        return tuple(c.terms[0][0] for c in self.coords)

    def unitary_part(self) -> "TorusPoint":
        """z0 with z = T^{val z} z0."""
        return TorusPoint(tuple(c.shift(-c.terms[0][0]) for c in self.coords))

    def is_unitary(self) -> bool:
        return all(v == 0 for v in self.valuation_vector())

    def is_identity(self) -> bool:
        return all(c == 1 for c in self.coords)

    def is_exact_monomial(self) -> bool:
        return all(c.is_monomial() for c in self.coords)

    def monomial(self, v: Sequence[int]) -> NovikovScalar:
        """p^v = prod p_i^{v_i}."""
        out = NovikovScalar.one()
        for c, k in zip(self.coords, v):
            if k:
                out = out * (c ** int(k))
        return out

    def __mul__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(tuple(a * b for a, b in zip(self.coords, other.coords)))

    def inverse(self) -> "TorusPoint":
        return TorusPoint(tuple(c.invert() for c in self.coords))

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def parse_point(text: str, source: Optional[str] = None) -> TorusPoint:
    """Parse ``(a1, ..., an)`` where each entry is a Novikov expression."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    parts = _split_top_level(s)
    if not parts or any(not p.strip() for p in parts):
        raise ParseError(f"bad point {text!r}", text, None, source)
    try:
        return TorusPoint(tuple(parse_novikov(p, source) for p in parts))
    except ZeroWithinPrecision as exc:
        raise ParseError(str(exc), text, None, source) from None


def _split_top_level(s: str, sep: str = ",") -> list:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def eval_at_point(f: LaurentElement, p: TorusPoint) -> NovikovScalar:
    if f.real:
        raise ValueError("evaluate real-exponent elements with eval_real")
    if p.n != f.n:
        raise ValueError(f"point of rank {p.n} for ring of rank {f.n}")
    out = NovikovScalar.zero()
    for v, a in f.terms.items():
        out = out + a * p.monomial(v)
    return out


def eval_real(f: LaurentElement, t, unit: Optional[NovikovScalar] = None) -> NovikovScalar:
    """f(T^t * u) for the rank-1 ring; u must be an exact monomial if given."""
    t = to_fraction(t)
    out = NovikovScalar.zero()
    for (r,), a in f.terms.items():
        term = a.shift(r * t)
        if unit is not None and r != 0:
            if r.denominator != 1:
                raise ValueError("unit twist needs integer exponents")
            term = term * (unit ** int(r))
        out = out + term
    return out


def real_line_substitute(f: LaurentElement, alpha: Sequence) -> LaurentElement:
    alpha = tuple(to_fraction(a) for a in alpha)
    if len(alpha) != f.n:
        raise ValueError("alpha has wrong length")
    out: Dict = {}
    for v, a in f.terms.items():
        r = sum((x * y for x, y in zip(alpha, v)), Fraction(0))
        out[(r,)] = out[(r,)] + a if (r,) in out else a
    return LaurentElement(1, out, real=True)


def as_real_ring(f: LaurentElement) -> LaurentElement:
    if f.real:
        return f
    if f.n != 1:
        raise ValueError("only rank-1 elements embed in the real-exponent ring")
    return LaurentElement(1, {(Fraction(v[0]),): a for v, a in f.terms.items()}, real=True)


@dataclass
class ZeroSet:
    """Zeros t of f(T^t) with the candidate list and exact evaluations."""
    zeros: Tuple[Fraction, ...]
    candidates: Tuple[Fraction, ...]
    evaluations: Dict[Fraction, NovikovScalar] = field(default_factory=dict)

    def report(self) -> dict:
        return {
            "zeros": [str(t) for t in self.zeros],
            "candidates": [str(t) for t in self.candidates],
            "evaluations": {str(t): str(v) for t, v in sorted(self.evaluations.items())},
        }


def _pieces(f: LaurentElement):
    pieces = []
    for (r,), a in sorted(f.terms.items()):
        if not a.is_exact():
            raise ValueError("exp_poly_zeros needs exact coefficients")
        pieces.append((r, a.terms[0][0]))
    return pieces


def _pairwise_breakpoints(pieces) -> set:
    out = set()
    for i in range(len(pieces)):
        ri, vi = pieces[i]
        for j in range(i + 1, len(pieces)):
            rj, vj = pieces[j]
            if ri == rj:
                continue
            t = (vj - vi) / (ri - rj)
            if not isinstance(t, Fraction):
                raise IrrationalBreakpoint(f"breakpoint {t!r} is not rational")
            out.add(t)
    return out


def envelope_value(pieces, t: Fraction):
    return min(v + r * t for r, v in pieces)


def exp_poly_zeros(f: LaurentElement) -> ZeroSet:
    """Rational t with f(T^t) = 0, found at lower-envelope breakpoints."""
    f = as_real_ring(f)
    if f.is_zero():
        raise ZeroInput("exp_poly_zeros of the zero element")
    pieces = _pieces(f)
    candidates = []
    for t in sorted(_pairwise_breakpoints(pieces)):
        m = envelope_value(pieces, t)
        if sum(1 for r, v in pieces if v + r * t == m) >= 2:
            candidates.append(t)
    evals = {t: eval_real(f, t) for t in candidates}
    zeros = tuple(t for t in candidates if evals[t].is_zero())
    return ZeroSet(zeros, tuple(candidates), evals)


def brute_force_zeros(f: LaurentElement) -> Tuple[Fraction, ...]:
    """Oracle: every t where some two terms have equal valuation, checked by summing a T^{rt}.

    Shares no code with exp_poly_zeros beyond the ring arithmetic.
    """
    f = as_real_ring(f)
    if f.is_zero():
        raise ZeroInput("zero element")
    terms = [(r, a) for (r,), a in f.terms.items()]
    cands = set()
    for (r1, a1), (r2, a2) in itertools.combinations(terms, 2):
        if r1 != r2:
            cands.add((a2.val - a1.val) / (r1 - r2))
    out = []
    for t in cands:
        total = NovikovScalar.zero()
        for r, a in terms:
            total = total + a * NovikovScalar.T(r * t)
        if total.is_zero():
            out.append(t)
    return tuple(sorted(out))