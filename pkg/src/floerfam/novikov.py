"""Exact truncated arithmetic in the Novikov field.

Elements are finite sums of monomials c*T^e with rational exponents and
Gaussian-rational coefficients, together with a precision cutoff: an
element with cutoff p is only known modulo T^p.  A cutoff of ``None``
means the element is exact.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union


class ZeroWithinPrecision(ArithmeticError):
    """Raised when an element cannot be distinguished from zero."""


class ParseError(ValueError):
    """Malformed text input.  ``position`` is a column offset when known."""

    def __init__(self, message: str, text: str = "", position: Optional[int] = None,
                 source: Optional[str] = None):
        self.text = text
        self.position = position
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}: "
        if position is not None and "\n" in text[:position]:
            line = text.count("\n", 0, position) + 1
            where += f"line {line} col {position - text.rfind(chr(10), 0, position)}: "
        elif position is not None:
            where += f"col {position}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class NovikovConfig:
    # relative precision used when inverting an exact non-monomial series
    default_relative_precision: Fraction = Fraction(24)


CONFIG = NovikovConfig()


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot read {x!r} as an exact rational")


class GaussianRational:
    """Exact element of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = to_fraction(re)
        self.im = to_fraction(im)

    @staticmethod
    def _raw(re: Fraction, im: Fraction) -> "GaussianRational":
        g = object.__new__(GaussianRational)
        g.re = re
        g.im = im
        return g

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        return GaussianRational._raw(to_fraction(x), Fraction(0))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __add__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __mul__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        if not self.im and not o.im:
            return GaussianRational._raw(self.re * o.re, Fraction(0))
        return GaussianRational._raw(self.re * o.re - self.im * o.im,
                                     self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        if not self:
            raise ZeroDivisionError("inverse of 0 in Q(i)")
        if not self.im:
            return GaussianRational._raw(1 / self.re, Fraction(0))
        n = self.re * self.re + self.im * self.im
        return GaussianRational._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _as_gauss(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers of coefficients")
        if k < 0:
            return self.inverse() ** (-k)
        out = GaussianRational._raw(Fraction(1), Fraction(0))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return GaussianRational._raw(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self):
        if not self.im:
            return str(self.re)
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}*i)"

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


def _as_gauss(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return GaussianRational._raw(Fraction(x), Fraction(0))
    return None


_ZERO_Q = Fraction(0)
_ONE_G = GaussianRational._raw(Fraction(1), Fraction(0))

Number = Union[int, Fraction, GaussianRational]


@dataclass(frozen=True)
class Valuation:
    """T-adic valuation; ``value`` is None for +infinity.

    ``indeterminate`` is set when the element has no known terms but a
    finite cutoff, in which case ``value`` records the cutoff as a lower
    bound.
    """
    value: Optional[Fraction]
    indeterminate: bool = False

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __str__(self):
        if self.value is None:
            return "+oo"
        return (">=" if self.indeterminate else "") + str(self.value)


def _min_cut(a: Optional[Fraction], b: Optional[Fraction]) -> Optional[Fraction]:
    if a is None:
        return b
    if b is None:
        return a
    return a if a < b else b


def _add_cut(c: Optional[Fraction], v: Optional[Fraction]) -> Optional[Fraction]:
    if c is None or v is None:
        return None
    return c + v


class NovikovScalar:
    """Truncated Novikov series.

    ``terms`` is a tuple of (exponent, coefficient) with strictly increasing
    exponents, all below ``cutoff``.
    """

    __slots__ = ("terms", "cutoff", "_hash")

    def __init__(self, terms: Iterable = (), cutoff=None):
        cut = None if cutoff is None else to_fraction(cutoff)
        acc: dict = {}
        for e, c in terms:
            e = to_fraction(e)
            c = GaussianRational.coerce(c)
            if e in acc:
                acc[e] = acc[e] + c
            else:
                acc[e] = c
        items = tuple(sorted((e, c) for e, c in acc.items()
                             if c and (cut is None or e < cut)))
        self.terms = items
        self.cutoff = cut
        self._hash = None

    @staticmethod
    def _raw(terms: tuple, cutoff: Optional[Fraction]) -> "NovikovScalar":
        s = object.__new__(NovikovScalar)
        s.terms = terms
        s.cutoff = cutoff
        s._hash = None
        return s

    # constructors
    @staticmethod
    def zero(cutoff=None) -> "NovikovScalar":
        return NovikovScalar._raw((), None if cutoff is None else to_fraction(cutoff))

    @staticmethod
    def one() -> "NovikovScalar":
        return NovikovScalar._raw(((_ZERO_Q, _ONE_G),), None)

    @staticmethod
    def monomial(coef: Number = 1, exponent=0) -> "NovikovScalar":
        c = GaussianRational.coerce(coef)
        if not c:
            return NovikovScalar.zero()
        return NovikovScalar._raw(((to_fraction(exponent), c),), None)

    @staticmethod
    def T(exponent=1) -> "NovikovScalar":
        return NovikovScalar.monomial(1, exponent)

    @staticmethod
    def coerce(x) -> "NovikovScalar":
        if isinstance(x, NovikovScalar):
            return x
        return NovikovScalar.monomial(x, 0)

    # predicates
    def is_exact(self) -> bool:
        return self.cutoff is None

    def is_zero(self) -> bool:
        """Exactly zero (no terms, no cutoff)."""
        return not self.terms and self.cutoff is None

    def is_indistinguishable_from_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1 and self.cutoff is None

    def is_constant(self) -> bool:
        return self.cutoff is None and all(e == 0 for e, _ in self.terms)

    def valuation(self) -> Valuation:
        if self.terms:
            return Valuation(self.terms[0][0])
        if self.cutoff is None:
            return Valuation(None)
        return Valuation(self.cutoff, True)

    @property
    def val(self) -> Optional[Fraction]:
        """Leading exponent, or a lower bound (the cutoff) if no term is known."""
        if self.terms:
            return self.terms[0][0]
        return self.cutoff

    def leading_term(self):
        if not self.terms:
            raise ZeroWithinPrecision(f"{self} has no determinate leading term")
        return self.terms[0]

    def norm_exponent(self) -> Optional[Fraction]:
        """q with |a|_T = e^{-q}; None for exact zero."""
        v = self.valuation()
        if v.indeterminate:
            raise ZeroWithinPrecision(f"norm of {self} undetermined")
        return v.value

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, NovikovScalar):
            if isinstance(other, (int, Fraction, GaussianRational)):
                other = NovikovScalar.coerce(other)
            else:
                return NotImplemented
        cut = _min_cut(self.cutoff, other.cutoff)
        if not other.terms and cut == self.cutoff:
            return self
        if not self.terms and cut == other.cutoff:
            return other
        acc = dict(self.terms)
        for e, c in other.terms:
            if e in acc:
                s = acc[e] + c
                if s:
                    acc[e] = s
                else:
                    del acc[e]
            else:
                acc[e] = c
        items = sorted(acc.items())
        if cut is not None:
            items = [t for t in items if t[0] < cut]
        return NovikovScalar._raw(tuple(items), cut)

    __radd__ = __add__

    def __neg__(self):
        return NovikovScalar._raw(tuple((e, -c) for e, c in self.terms), self.cutoff)

    def __sub__(self, other):
        if not isinstance(other, NovikovScalar):
            if isinstance(other, (int, Fraction, GaussianRational)):
                other = NovikovScalar.coerce(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return NovikovScalar.coerce(other) - self

    def scale(self, c: Number) -> "NovikovScalar":
        c = GaussianRational.coerce(c)
        if not c:
            return NovikovScalar.zero()
        return NovikovScalar._raw(tuple((e, x * c) for e, x in self.terms), self.cutoff)

    def shift(self, exponent) -> "NovikovScalar":
        """Multiply by T^exponent."""
        s = to_fraction(exponent)
        return NovikovScalar._raw(tuple((e + s, c) for e, c in self.terms),
                                  None if self.cutoff is None else self.cutoff + s)

    def __mul__(self, other):
        if not isinstance(other, NovikovScalar):
            if isinstance(other, (int, Fraction, GaussianRational)):
                return self.scale(other)
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return NovikovScalar.zero()
        cut = _min_cut(_add_cut(self.cutoff, other.val), _add_cut(other.cutoff, self.val))
        if len(other.terms) == 1 and other.cutoff is None:
            e0, c0 = other.terms[0]
            items = tuple((e + e0, c * c0) for e, c in self.terms)
            if cut is not None:
                items = tuple(t for t in items if t[0] < cut)
            return NovikovScalar._raw(items, cut)
        acc: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                if cut is not None and e >= cut:
                    continue
                if e in acc:
                    acc[e] = acc[e] + c1 * c2
                else:
                    acc[e] = c1 * c2
        items = tuple(sorted((e, c) for e, c in acc.items() if c))
        return NovikovScalar._raw(items, cut)

    __rmul__ = __mul__

    def truncate(self, cutoff) -> "NovikovScalar":
        """Reduce modulo T^cutoff."""
        cut = _min_cut(self.cutoff, to_fraction(cutoff))
        return NovikovScalar._raw(tuple(t for t in self.terms if t[0] < cut), cut)

    def invert(self, cutoff=None) -> "NovikovScalar":
        """Multiplicative inverse.

        Exact monomials invert exactly.  Other elements are inverted by the
        geometric series; the result is known modulo T^cutoff where cutoff
        defaults to -val + the configured relative precision, and is further
        limited by the precision of the input.
        """
        if not self.terms:
            raise ZeroWithinPrecision(f"cannot invert {self}")
        v, c = self.terms[0]
        cinv = c.inverse()
        if len(self.terms) == 1 and self.cutoff is None:
            return NovikovScalar._raw(((-v, cinv),), None)
        target = (-v + CONFIG.default_relative_precision) if cutoff is None else to_fraction(cutoff)
        if self.cutoff is not None:
            target = min(target, self.cutoff - 2 * v)
        rel = target + v
        # self = c T^v (1 + u) with val(u) > 0
        u = NovikovScalar._raw(tuple((e - v, x * cinv) for e, x in self.terms[1:]),
                               None if self.cutoff is None else self.cutoff - v)
        total = NovikovScalar.one().truncate(rel) if rel > 0 else NovikovScalar.zero(rel)
        power = total
        neg_u = (-u).truncate(rel)
        while power.terms:
            power = (power * neg_u).truncate(rel)
            total = total + power
        return total.scale(cinv).shift(-v)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(GaussianRational.coerce(other).inverse())
        if isinstance(other, NovikovScalar):
            return self * other.invert()
        return NotImplemented

    def __rtruediv__(self, other):
        return NovikovScalar.coerce(other) * self.invert()

    def __pow__(self, k):
        if isinstance(k, Fraction) and k.denominator == 1:
            k = int(k)
        if isinstance(k, int):
            if k < 0:
                return self.invert() ** (-k)
            out = NovikovScalar.one()
            base = self
            while k:
                if k & 1:
                    out = out * base
                base = base * base
                k >>= 1
            return out
        q = to_fraction(k)
        if self.is_monomial() and self.terms[0][1] == 1:
            return NovikovScalar._raw(((self.terms[0][0] * q, _ONE_G),), None)
        raise ValueError(f"rational power {q} only defined for T^e monomials, not {self}")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = NovikovScalar.coerce(other)
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        return self.terms == other.terms and self.cutoff == other.cutoff

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.terms, self.cutoff))
        return self._hash

    def agrees_with(self, other: "NovikovScalar") -> bool:
        """Equality modulo the smaller of the two cutoffs."""
        d = self - other
        return not d.terms

    def constant_value(self) -> GaussianRational:
        if not self.terms:
            return GaussianRational()
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.terms[0][1]

    def rational_value(self) -> Fraction:
        g = self.constant_value()
        if g.im:
            raise ValueError(f"{self} is not rational")
        return g.re

    def __str__(self):
        return format_novikov(self)

    def __repr__(self):
        return f"NovikovScalar({format_novikov(self)!r})"


def format_novikov(a: NovikovScalar) -> str:
    parts = [f"{c}*T^({e})" for e, c in a.terms]
    if a.cutoff is not None:
        parts.append(f"O(T^({a.cutoff}))")
    if not parts:
        return "0"
    return " + ".join(parts)


def arith(a: NovikovScalar, b, op: str) -> NovikovScalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scalar-mul":
        return a.scale(b)
    raise ValueError(f"unknown operation {op!r}")


def invert(a: NovikovScalar, cutoff=None) -> NovikovScalar:
    return a.invert(cutoff)


def valuation(a: NovikovScalar) -> Valuation:
    return a.valuation()


# ---------------------------------------------------------------- parsing

class _BigO:
    """Marker produced by O(T^p) while evaluating an expression."""

    def __init__(self, cutoff: Fraction):
        self.cutoff = cutoff


class ExpressionEvaluator:
    """Evaluate arithmetic text with ``ast``.

    ``names`` maps identifiers to values.  Values combine through their own
    operators, so the same evaluator serves scalars and Laurent elements.
    """

    def __init__(self, names: dict, promote=None):
        self.names = dict(names)
        self.promote = promote or NovikovScalar.coerce

    def evaluate(self, text: str, source: Optional[str] = None):
        src = text.replace("^", "**")
        try:
            tree = ast.parse(src.strip(), mode="eval")
        except SyntaxError as exc:
            raise ParseError(f"syntax error in {text!r}", text, exc.offset, source) from None
        self._text = text
        self._source = source
        return self._eval(tree.body)

    def _fail(self, node, msg):
        raise ParseError(msg, self._text, getattr(node, "col_offset", None), self._source)

    def _eval(self, node):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                self._fail(node, f"only integer literals are allowed, got {node.value!r}")
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id not in self.names:
                self._fail(node, f"unknown name {node.id!r}")
            return self.names[node.id]
        if isinstance(node, ast.Tuple):
            return tuple(self._exponent(e) for e in node.elts)
        if isinstance(node, ast.UnaryOp):
            v = self._eval(node.operand)
            if isinstance(node.op, ast.USub):
                return -v
            if isinstance(node.op, ast.UAdd):
                return v
            self._fail(node, "unsupported unary operator")
        if isinstance(node, ast.Call):
            if isinstance(node.func, ast.Name) and node.func.id == "O" and len(node.args) == 1:
                arg = self._eval(node.args[0])
                if isinstance(arg, Fraction) and arg == 1:
                    return _BigO(Fraction(0))
                if isinstance(arg, NovikovScalar) and arg.is_monomial() and arg.terms[0][1] == 1:
                    return _BigO(arg.terms[0][0])
                self._fail(node, "O(...) expects T^(p)")
            self._fail(node, "unsupported function call")
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                base = self._eval(node.left)
                exp = self._exponent(node.right)
                try:
                    if isinstance(base, Fraction):
                        if isinstance(exp, Fraction) and exp.denominator == 1:
                            return base ** int(exp)
                        self._fail(node, "rational power of a number")
                    return base ** exp
                except (ValueError, TypeError, ZeroDivisionError, ZeroWithinPrecision) as exc:
                    self._fail(node, str(exc))
            left = self._eval(node.left)
            right = self._eval(node.right)
            if isinstance(left, _BigO) or isinstance(right, _BigO):
                if not isinstance(node.op, (ast.Add, ast.Sub)):
                    self._fail(node, "O(...) may only be added")
                return self._add_bigo(left, right, node)
            try:
                if isinstance(node.op, ast.Add):
                    return left + right
                if isinstance(node.op, ast.Sub):
                    return left - right
                if isinstance(node.op, ast.Mult):
                    return left * right
                if isinstance(node.op, ast.Div):
                    return left / right
            except (ValueError, TypeError, ZeroDivisionError, ZeroWithinPrecision) as exc:
                self._fail(node, str(exc))
            self._fail(node, "unsupported operator")
        self._fail(node, f"unsupported syntax {type(node).__name__}")

    def _add_bigo(self, left, right, node):
        if isinstance(left, _BigO) and isinstance(right, _BigO):
            return _BigO(min(left.cutoff, right.cutoff))
        o, v = (left, right) if isinstance(left, _BigO) else (right, left)
        if isinstance(v, Fraction) or isinstance(v, GaussianRational):
            v = self.promote(v)
        if hasattr(v, "truncate"):
            return v.truncate(o.cutoff)
        self._fail(node, "cannot attach O(...) here")

    def _exponent(self, node):
        v = self._eval(node)
        if isinstance(v, tuple):
            return v
        if isinstance(v, Fraction):
            return v
        if isinstance(v, NovikovScalar) and v.is_constant():
            try:
                return v.rational_value()
            except ValueError:
                pass
        self._fail(node, "exponent must be an exact rational")


def _finish(value, text, source):
    if isinstance(value, _BigO):
        return NovikovScalar.zero(value.cutoff)
    if isinstance(value, (Fraction, GaussianRational)):
        return NovikovScalar.coerce(value)
    if isinstance(value, NovikovScalar):
        return value
    raise ParseError(f"{text!r} does not denote a Novikov scalar", text, None, source)


def scalar_names() -> dict:
    return {"T": NovikovScalar.T(1), "i": GaussianRational(0, 1), "I": GaussianRational(0, 1)}


def parse_novikov(text: str, source: Optional[str] = None) -> NovikovScalar:
    """Parse ``c1*T^(e1) + ... + O(T^(p))`` (and general arithmetic in T, i)."""
    if text.strip() == "0":
        return NovikovScalar.zero()
    value = ExpressionEvaluator(scalar_names()).evaluate(text, source)
    return _finish(value, text, source)


def norm_float(a: NovikovScalar) -> float:
    """|a|_T = e^{-val(a)} as a float (for display only)."""
    q = a.norm_exponent()
    return 0.0 if q is None else math.exp(-float(q))
