"""Small exact linear algebra kit over Fraction (row reduction, kernels,
solving, characteristic polynomials, rational eigenvalues)."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

Matrix = List[List[Fraction]]


def mat(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity_matrix(n: int) -> Matrix:
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    out = [[Fraction(0)] * m for _ in range(n)]
    for i in range(n):
        for t in range(k):
            ait = a[i][t]
            if ait:
                row_b = b[t]
                row_o = out[i]
                for j in range(m):
                    row_o[j] += ait * row_b[j]
    return out


def mat_vec(a: Matrix, v: Sequence[Fraction]) -> List[Fraction]:
    return [sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in a]


def rref(rows: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form (in place on a copy) and the pivot columns."""
    m = [row[:] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def kernel_basis(rows: Matrix, ncols: Optional[int] = None) -> List[List[Fraction]]:
    """Basis of the right kernel of the matrix (columns = unknowns)."""
    if not rows:
        n = ncols or 0
        return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    n = ncols or len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """One solution of A x = b, or None if inconsistent."""
    n = len(a)
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [Fraction(b[i])] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    # inconsistent iff a pivot lands in the last column
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return x


def rank(rows: Matrix) -> int:
    return len(rref(rows)[1])


def charpoly(a: Matrix) -> List[Fraction]:
    """Coefficients [c0, ..., cn] of det(xI - A) = sum c_k x^k (Faddeev-LeVerrier)."""
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = identity_matrix(n)
    c = Fraction(1)
    for k in range(1, n + 1):
        m = mat_mul(a, m)
        c = -Fraction(sum(m[i][i] for i in range(n)), k)
        coeffs[n - k] = c
        for i in range(n):
            m[i][i] += c
    return coeffs


def poly_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def poly_divide_root(coeffs: Sequence[Fraction], root: Fraction) -> List[Fraction]:
    """Deflate poly by (x - root) via synthetic division; root must be exact."""
    rev = list(reversed(coeffs))
    quot = []
    acc = Fraction(0)
    for c in rev[:-1]:
        acc = acc * root + c
        quot.append(acc)
    return list(reversed(quot))


def _divisors(n: int) -> List[int]:
    n = abs(n)
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def rational_roots(coeffs: Sequence[Fraction]) -> Dict[Fraction, int]:
    """Rational roots with multiplicities (rational root theorem + deflation)."""
    poly = list(coeffs)
    # strip leading zeros at the low end: x = 0 roots
    roots: Dict[Fraction, int] = {}
    while len(poly) > 1 and poly[0] == 0:
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
        poly = poly[1:]
    while len(poly) > 1:
        # clear denominators to integers
        denlcm = 1
        for c in poly:
            denlcm = denlcm * c.denominator // gcd(denlcm, c.denominator)
        ints = [int(c * denlcm) for c in poly]
        a0, an = ints[0], ints[-1]
        if a0 == 0:
            roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
            poly = poly[1:]
            continue
        found = None
        for p in _divisors(a0):
            for q in _divisors(an):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    if poly_eval(poly, cand) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots[found] = roots.get(found, 0) + 1
        poly = poly_divide_root(poly, found)
    return roots
