"""Sparse exact linear algebra over the Novikov field and over Q.

Matrices are dicts ``row -> {col: entry}``.  Elimination over the Novikov
field keeps entries exact whenever it can: monomial pivots are inverted
exactly and other pivots are eliminated fraction-free (rows are scaled by
the pivot instead of divided by it), so cutoffs only appear when the
input already carries them.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from flint import fmpz_poly

from .novikov import NovikovScalar, ZeroWithinPrecision

SparseMatrix = Dict[Hashable, Dict[Hashable, NovikovScalar]]


def _copy(m: SparseMatrix) -> SparseMatrix:
    out = {}
    for r, row in m.items():
        clean = {c: v for c, v in row.items() if not v.is_zero()}
        if clean:
            out[r] = clean
    return out


def _pivot_key(v: NovikovScalar):
    # exact monomials first, then short series; lowest valuation breaks ties
    return (0 if v.is_monomial() else 1, len(v.terms), v.terms[0][0])


def _choose_pivot(rows: SparseMatrix, inexact: bool):
    best = None
    best_key = None
    undecided = False
    for r, row in rows.items():
        for c, v in row.items():
            if not v.terms:
                undecided = True
                continue
            if inexact:
                key = (v.terms[0][0], 0 if v.is_monomial() else 1, len(v.terms))
            else:
                key = _pivot_key(v)
            if best_key is None or key < best_key:
                best_key = key
                best = (r, c, v)
    return best, undecided


def row_reduce(matrix: SparseMatrix):
    """Gaussian elimination.  Returns the list of pivots (row, col).

    Raises ZeroWithinPrecision if the remaining entries are all
    indistinguishable from zero but not exactly zero.
    """
    rows = _copy(matrix)
    inexact = any(not v.is_exact() for row in rows.values() for v in row.values())
    pivots = []
    while rows:
        best, undecided = _choose_pivot(rows, inexact)
        if best is None:
            if undecided:
                raise ZeroWithinPrecision("pivot decision undetermined at current cutoff")
            break
        pr, pc, pv = best
        prow = rows.pop(pr)
        pivots.append((pr, pc))
        exact_inverse = pv.is_monomial() or inexact
        inv = pv.invert() if exact_inverse else None
        for r in list(rows):
            row = rows[r]
            b = row.get(pc)
            if b is None:
                continue
            if exact_inverse:
                f = b * inv
                for c, v in prow.items():
                    if c == pc:
                        continue
                    nv = row.get(c, None)
                    nv = -(f * v) if nv is None else nv - f * v
                    if nv.is_zero():
                        row.pop(c, None)
                    else:
                        row[c] = nv
                del row[pc]
            else:
                new = {}
                for c, v in row.items():
                    if c == pc:
                        continue
                    nv = v * pv
                    if not nv.is_zero():
                        new[c] = nv
                for c, v in prow.items():
                    if c == pc:
                        continue
                    nv = new.get(c)
                    nv = -(b * v) if nv is None else nv - b * v
                    if nv.is_zero():
                        new.pop(c, None)
                    else:
                        new[c] = nv
                row = _normalize_row(new)
                rows[r] = row
            if not rows[r]:
                del rows[r]
    return pivots


def _normalize_row(row: Dict) -> Dict:
    # divide by the leading monomial of one entry to limit coefficient growth
    if not row:
        return row
    ref = min(row.values(), key=lambda v: (len(v.terms), v.terms[0][0] if v.terms else 0))
    if not ref.terms:
        return row
    e, c = ref.terms[0]
    mono = NovikovScalar.monomial(c, e).invert()
    return {k: v * mono for k, v in row.items()}


def rank(matrix: SparseMatrix, method: str = "auto") -> int:
    """Rank over the Novikov field.

    ``auto`` uses the polynomial route when every entry is an exact finite
    sum with rational coefficients, and Novikov elimination otherwise.
    """
    if method not in ("auto", "novikov", "polynomial"):
        raise ValueError("method must be auto, novikov or polynomial")
    if method != "novikov":
        rows = _integer_polynomial_rows(matrix)
        if rows is not None:
            return _poly_rank(rows)
        if method == "polynomial":
            raise ValueError("polynomial rank needs exact entries with rational coefficients")
    return len(row_reduce(matrix))


# An exact matrix over Q[T^{1/D}, T^{-1/D}] has the same rank over the
# Novikov field as over Q(t), t = T^{1/D}.  Rows are cleared of negative
# powers and denominators, then eliminated fraction-free in Z[t] keeping
# each row primitive.  Dense polynomials of huge degree (large D) are
# slower than series elimination, so those fall back.

POLY_DEGREE_CAP = 4096

def _integer_polynomial_rows(matrix: SparseMatrix):
    den = 1
    for row in matrix.values():
        for v in row.values():
            if not v.is_exact():
                return None
            for e, c in v.terms:
                if c.im:
                    return None
                den = _lcm(den, e.denominator)
    out = {}
    for r, row in matrix.items():
        row = {c: v for c, v in row.items() if v.terms}
        if not row:
            continue
        low = min(v.terms[0][0] for v in row.values())
        if max(v.terms[-1][0] for v in row.values()) - low > Fraction(POLY_DEGREE_CAP, den):
            return None
        cden = 1
        for v in row.values():
            for _, c in v.terms:
                cden = _lcm(cden, c.re.denominator)
        prow = {}
        for col, v in row.items():
            coeffs: Dict[int, int] = {}
            for e, c in v.terms:
                coeffs[int((e - low) * den)] = int(c.re * cden)
            prow[col] = fmpz_poly([coeffs.get(i, 0) for i in range(max(coeffs) + 1)])
        out[r] = _primitive(prow)
    return out


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _primitive(row: Dict) -> Dict:
    g = None
    for v in row.values():
        g = v if g is None else g.gcd(v)
        if g.degree() == 0 and abs(int(g[0])) == 1:
            return row
    if g is None:
        return row
    return {c: v // g for c, v in row.items()}


def _poly_rank(rows: Dict) -> int:
    cols: Dict = {}
    for r, row in rows.items():
        for c in row:
            cols.setdefault(c, set()).add(r)
    n = 0
    while rows:
        best = None
        for r, row in rows.items():
            for c, v in row.items():
                key = (v.degree(), v.height() if hasattr(v, "height") else 0, len(row) * len(cols[c]))
                if best is None or key < best[0]:
                    best = (key, r, c)
                    if key[0] == 0 and key[2] == 1:
                        break
            if best is not None and best[0][0] == 0 and best[0][2] == 1:
                break
        _, pr, pc = best
        prow = rows.pop(pr)
        for c in prow:
            cols[c].discard(pr)
        pv = prow[pc]
        n += 1
        unit = pv.degree() == 0 and abs(int(pv[0])) == 1
        for r in list(cols[pc]):
            row = rows[r]
            b = row[pc]
            if unit:
                f = b * int(pv[0])
                new = dict(row)
                for c, v in prow.items():
                    nv = new.get(c)
                    nv = -(f * v) if nv is None else nv - f * v
                    if nv == 0:
                        new.pop(c, None)
                    else:
                        new[c] = nv
            else:
                new = {c: v * pv for c, v in row.items()}
                for c, v in prow.items():
                    nv = new.get(c)
                    nv = -(b * v) if nv is None else nv - b * v
                    if nv == 0:
                        new.pop(c, None)
                    else:
                        new[c] = nv
                new = _primitive(new)
            for c in row:
                if c not in new:
                    cols[c].discard(r)
            for c in new:
                cols.setdefault(c, set()).add(r)
            if new:
                rows[r] = new
            else:
                del rows[r]
    return n


def transpose(m: SparseMatrix) -> SparseMatrix:
    out: SparseMatrix = {}
    for r, row in m.items():
        for c, v in row.items():
            out.setdefault(c, {})[r] = v
    return out


def solve(matrix: SparseMatrix, rhs: Dict[Hashable, NovikovScalar]) -> Optional[Dict]:
    """Find x with matrix * x = rhs (matrix rows indexed like rhs keys).

    Returns None when the system is inconsistent.  Works by elimination on
    the augmented matrix with exact arithmetic when the data is exact.
    """
    aug_col = ("__rhs__",)
    aug = _copy(matrix)
    for r, v in rhs.items():
        if not v.is_zero():
            aug.setdefault(r, {})[aug_col] = v
    rows = _copy(aug)
    pivots = []
    order = []
    while True:
        cand = {r: {c: v for c, v in row.items() if c != aug_col} for r, row in rows.items()}
        cand = {r: row for r, row in cand.items() if row}
        best, undecided = _choose_pivot(cand, any(not v.is_exact()
                                                  for row in cand.values() for v in row.values()))
        if best is None:
            if undecided:
                raise ZeroWithinPrecision("pivot decision undetermined at current cutoff")
            break
        pr, pc, pv = best
        prow = rows.pop(pr)
        inv = pv.invert()
        prow = {c: v * inv for c, v in prow.items()}
        order.append((pc, prow))
        for r in list(rows):
            row = rows[r]
            b = row.get(pc)
            if b is None:
                continue
            for c, v in prow.items():
                nv = row.get(c)
                nv = -(b * v) if nv is None else nv - b * v
                if nv.is_indistinguishable_from_zero() and nv.is_exact():
                    row.pop(c, None)
                else:
                    row[c] = nv
            row.pop(pc, None)
            if not row:
                del rows[r]
    for r, row in rows.items():
        v = row.get(aug_col)
        if v is not None:
            if v.terms:
                return None
            if not v.is_exact():
                raise ZeroWithinPrecision("consistency of the system undetermined")
    x: Dict = {}
    for pc, prow in reversed(order):
        val = prow.get(aug_col, NovikovScalar.zero())
        for c, v in prow.items():
            if c in (pc, aug_col):
                continue
            if c in x:
                val = val - v * x[c]
        x[pc] = val
    return x


def mat_vec(matrix: SparseMatrix, x: Dict) -> Dict:
    out: Dict = {}
    for r, row in matrix.items():
        acc = NovikovScalar.zero()
        for c, v in row.items():
            if c in x:
                acc = acc + v * x[c]
        if not acc.is_zero():
            out[r] = acc
    return out


# ------------------------------------------------------ generic determinants

def determinant(rows: Sequence[Sequence], zero, one):
    """Determinant over any commutative ring by expansion with memoisation.

    Cost is O(2^n * n) ring operations, fine for the small minors used here.
    """
    n = len(rows)
    if n == 0:
        return one
    memo: Dict[Tuple[int, ...], object] = {}

    def det(start: int, cols: Tuple[int, ...]):
        if start == n:
            return one
        key = cols
        if key in memo:
            return memo[key]
        acc = zero
        row = rows[start]
        for idx, c in enumerate(cols):
            a = row[c]
            if _is_zero(a):
                continue
            sub = det(start + 1, cols[:idx] + cols[idx + 1:])
            if _is_zero(sub):
                continue
            term = a * sub
            acc = acc + term if idx % 2 == 0 else acc - term
        memo[key] = acc
        return acc

    return det(0, tuple(range(n)))


def _is_zero(a) -> bool:
    if hasattr(a, "is_zero"):
        return a.is_zero()
    return a == 0


# ----------------------------------------------------------- rational algebra

def rational_rref(rows: List[List[Fraction]]):
    m = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rational_rank(rows: List[List[Fraction]]) -> int:
    if not rows:
        return 0
    return len(rational_rref(rows)[1])


def rational_solve(a: List[List[Fraction]], b: List[Fraction]) -> Optional[List[Fraction]]:
    """Unique solution of a square-or-tall system, None if singular or inconsistent."""
    n = len(a[0])
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    red, piv = rational_rref(aug)
    if n in piv:
        return None
    if len(piv) < n:
        return None
    x = [Fraction(0)] * n
    for row, c in zip(red, piv):
        x[c] = row[n]
    return x


def rational_nullspace(rows: List[List[Fraction]], ncols: int) -> List[List[Fraction]]:
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, piv = rational_rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, c in zip(red, piv):
            v[c] = -row[f]
        basis.append(v)
    return basis


def integer_scale(v: Sequence[Fraction]) -> List[int]:
    from math import gcd
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return [x // g for x in ints] if g else ints
