"""Enumeration of primitive segments by coprime pairs, Levy functions,
truncated formal Dirichlet series, and the boundary Mellin-type transform
with its Hecke-series identity verifier.

For each coprime pair (c, d) with 1 <= c < d there is exactly one pair of
"reduced" integer matrices (non-negative entries, rows and columns
non-decreasing) with bottom row (c, d) and determinants -1 and +1.  Their
images of [0, 1] are mirror intervals; the one inside [0, 1/2] has length
1/(d(c+d)) and collects the numbers whose consecutive convergent
denominators are (c, d).  The transform sums the matrix-twisted values
mu(inf, c/d) into a truncated Dirichlet series; multiplied by the two
diagonal series it reproduces the Hecke column sum_n (T_n mu)(inf, 0)/n^s
coefficient by coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .boundary import INFINITY, ProjectiveRational, RationalMatrix, as_point
from .chains import PrimitiveSegment
from .measures import PseudoMeasure, ValueGroup
from .modular import hecke, hecke_cosets


@dataclass(frozen=True)
class ReducedPair:
    """The two reduced matrices sharing the bottom row (c, d); determinant of
    g_minus is -1 and of g_plus is +1.  The marginal pair (1, 1) only has
    g_minus."""

    c: int
    d: int
    g_minus: RationalMatrix
    g_plus: Optional[RationalMatrix]


def _is_reduced(a: int, b: int, c: int, d: int) -> bool:
    return min(a, b, c, d) >= 0 and a <= b and c <= d and a <= c and b <= d


def reduced_pair(c: int, d: int) -> ReducedPair:
    if c < 1 or d < c or gcd(c, d) != 1:
        raise ValueError("need coprime 1 <= c <= d")
    if (c, d) == (1, 1):
        return ReducedPair(1, 1, RationalMatrix(0, 1, 1, 1), None)
    if c == d:
        raise ValueError("need c < d except the marginal (1,1)")
    # determinant -1: a*d - b*c = -1
    a = (-pow(d, -1, c)) % c if c > 1 else 0
    b = (a * d + 1) // c
    if not _is_reduced(a, b, c, d):
        a, b = a + c, b + d
    gm = RationalMatrix(a, b, c, d)
    assert _is_reduced(a, b, c, d) and gm.det == -1
    # determinant +1
    a = pow(d, -1, c) % c if c > 1 else 0
    b = (a * d - 1) // c
    if not _is_reduced(a, b, c, d) or a * d - b * c != 1:
        a, b = a + c, b + d
    gp = RationalMatrix(a, b, c, d)
    assert _is_reduced(a, b, c, d) and gp.det == 1
    return ReducedPair(c, d, gm, gp)


def coprime_cd(max_d: int) -> Iterable[Tuple[int, int]]:
    """The enumeration set: (1,1) then all coprime 1 <= c < d <= max_d."""
    yield (1, 1)
    for d in range(2, max_d + 1):
        for c in range(1, d):
            if gcd(c, d) == 1:
                yield (c, d)


def farey_interval_pair(c: int, d: int) -> Tuple[PrimitiveSegment, PrimitiveSegment]:
    """(I_minus, I_plus): the primitive interval of the pair inside [0, 1/2]
    and its mirror 1 - I_minus inside [1/2, 1], positively oriented."""
    if (c, d) == (1, 1):
        return (PrimitiveSegment(ProjectiveRational(0), ProjectiveRational(1, 2)),
                PrimitiveSegment(ProjectiveRational(1, 2), ProjectiveRational(1)))
    rp = reduced_pair(c, d)
    intervals = []
    for g in (rp.g_minus, rp.g_plus):
        x, y = g(0), g(1)
        lo, hi = (x, y) if x.as_fraction() < y.as_fraction() else (y, x)
        intervals.append(PrimitiveSegment(lo, hi))
    i0, i1 = intervals
    if i0.b.as_fraction() <= Fraction(1, 2):
        return (i0, i1)
    return (i1, i0)


def interval_length(seg: PrimitiveSegment) -> Fraction:
    return abs(seg.b.as_fraction() - seg.a.as_fraction())


# ---------------------------------------------------------------------------
# Levy functions


@dataclass(frozen=True)
class LevyFunction:
    """Coefficient rule on the primitive intervals indexed by coprime pairs.

    rule(c, d, side) gives the coefficient on the interval of the pair on
    the requested side: -1 for the copy in [0, 1/2], +1 for its mirror.  The
    marginal (1, 1) contributes once through side 0.
    """

    rule: Callable[[int, int, int], Any]
    group: ValueGroup
    name: str = "levy"


def indicator_levy(group: ValueGroup) -> LevyFunction:
    one = Fraction(1)
    return LevyFunction(lambda c, d, side: one, group, name="indicator")


def levy_eval(f: LevyFunction, alpha, max_d: int):
    """Truncated boundary Levy sum at a rational point.

    The segment system is the unit-periodic family of the pair intervals;
    the value at alpha uses the copy inside [floor(alpha), floor(alpha)+1],
    so the sum is exactly 1-periodic.  Membership is closed (rational alpha
    may sit on interval ends; the truncation keeps every sum finite).
    """
    alpha = Fraction(alpha)
    t = alpha - (alpha.numerator // alpha.denominator)
    grp = f.group
    total = f.rule(1, 1, 0)
    for c, d in coprime_cd(max_d):
        if (c, d) == (1, 1):
            continue
        i_minus, i_plus = farey_interval_pair(c, d)
        if i_minus.a.as_fraction() <= t <= i_minus.b.as_fraction():
            total = grp.add(total, f.rule(c, d, -1))
        if i_plus.a.as_fraction() <= t <= i_plus.b.as_fraction():
            total = grp.add(total, f.rule(c, d, +1))
    return total


# ---------------------------------------------------------------------------
# truncated formal Dirichlet series


class FormalDirichletSeries:
    """Finitely many coefficients a_1..a_N of a formal Dirichlet series."""

    def __init__(self, truncation: int, coeffs: Dict[int, Any], group: Optional[ValueGroup] = None):
        if truncation < 1:
            raise ValueError("truncation must be >= 1")
        self.truncation = truncation
        self.group = group
        self.coeffs = {n: v for n, v in coeffs.items() if 1 <= n <= truncation}

    def coeff(self, n: int):
        if n in self.coeffs:
            return self.coeffs[n]
        return self.group.zero() if self.group is not None else 0

    def __add__(self, other: "FormalDirichletSeries") -> "FormalDirichletSeries":
        n = min(self.truncation, other.truncation)
        grp = self.group or other.group
        out = {}
        for k in range(1, n + 1):
            out[k] = grp.add(self.coeff(k), other.coeff(k)) if grp else self.coeff(k) + other.coeff(k)
        return FormalDirichletSeries(n, out, grp)

    def shift_argument(self, w: int) -> "FormalDirichletSeries":
        """L(s) -> L(s - w): multiply the n-th coefficient by n^w."""
        grp = self.group
        out = {}
        for n, v in self.coeffs.items():
            if grp is not None and grp.has_scalars:
                out[n] = grp.scalar_mul(Fraction(n) ** w, v)
            else:
                out[n] = v * Fraction(n) ** w
        return FormalDirichletSeries(self.truncation, out, grp)

    def equal_coefficients(self, other: "FormalDirichletSeries") -> bool:
        n = min(self.truncation, other.truncation)
        grp = self.group or other.group
        for k in range(1, n + 1):
            if grp is not None:
                if not grp.eq(self.coeff(k), other.coeff(k)):
                    return False
            elif self.coeff(k) != other.coeff(k):
                return False
        return True


def dirichlet_mul(a: FormalDirichletSeries, b: FormalDirichletSeries,
                  compose: Callable[[Any, Any], Any], group: Optional[ValueGroup] = None,
                  add: Optional[Callable[[Any, Any], Any]] = None,
                  zero: Optional[Callable[[], Any]] = None) -> FormalDirichletSeries:
    """Coefficient convolution c_n = sum over d1 d2 = n of a_{d1} . b_{d2}."""
    n = min(a.truncation, b.truncation)
    tgt = group or b.group
    addf = add or (tgt.add if tgt else (lambda x, y: x + y))
    zerof = zero or (tgt.zero if tgt else (lambda: 0))
    out = {}
    for k in range(1, n + 1):
        acc = zerof()
        for d1 in range(1, k + 1):
            if k % d1:
                continue
            d2 = k // d1
            if d1 in a.coeffs and d2 in b.coeffs:
                acc = addf(acc, compose(a.coeffs[d1], b.coeffs[d2]))
        out[k] = acc
    return FormalDirichletSeries(n, out, tgt)


# group-ring coefficients: formal rational combinations of rational matrices

GroupRing = Dict[RationalMatrix, Fraction]


def groupring_single(m: RationalMatrix, coeff=Fraction(1)) -> GroupRing:
    return {m: Fraction(coeff)}


def groupring_add(x: GroupRing, y: GroupRing) -> GroupRing:
    out = dict(x)
    for m, c in y.items():
        out[m] = out.get(m, Fraction(0)) + c
    return {m: c for m, c in out.items() if c}


def groupring_mul(x: GroupRing, y: GroupRing) -> GroupRing:
    out: GroupRing = {}
    for m1, c1 in x.items():
        for m2, c2 in y.items():
            m = m1 * m2
            out[m] = out.get(m, Fraction(0)) + c1 * c2
    return {m: c for m, c in out.items() if c}


def groupring_apply(x: GroupRing, value, group: ValueGroup):
    out = group.zero()
    for m, c in x.items():
        acted = group.act_rational(m, value)
        out = group.add(out, group.scalar_mul(c, acted) if c != 1 else acted)
    return out


def z_minus_series(truncation: int) -> FormalDirichletSeries:
    """sum over d1 of diag(1, 1/d1) / d1^s, truncated."""
    return FormalDirichletSeries(
        truncation,
        {d: groupring_single(RationalMatrix(1, 0, 0, Fraction(1, d))) for d in range(1, truncation + 1)},
    )


def z_plus_series(truncation: int) -> FormalDirichletSeries:
    """sum over d2 of diag(1/d2, 1) / d2^s, truncated."""
    return FormalDirichletSeries(
        truncation,
        {d: groupring_single(RationalMatrix(Fraction(1, d), 0, 0, 1)) for d in range(1, truncation + 1)},
    )


def lm_matrix(c: int, d: int) -> RationalMatrix:
    """The twist (1, -c/d; 0, 1/d) applied to mu(inf, c/d) in the transform."""
    return RationalMatrix(1, Fraction(-c, d), 0, Fraction(1, d))


def lm_transform(mu: PseudoMeasure, truncation: int) -> FormalDirichletSeries:
    """Coefficient at d: the sum over admissible c of the twisted values
    (1, -c/d; 0, 1/d)[mu(inf, c/d)]; the marginal pair (1,1) supplies the
    d = 1 coefficient (1, -1; 0, 1)[mu(inf, 1)].

    The interval lengths 1/(d(c+d)) of the underlying Levy function cancel
    against integration over [0, 1/2], so only the twisted values remain.
    """
    grp = mu.group
    if not grp.has_rational_action:
        raise ValueError("the transform needs a GL(2,Q) action on values")
    coeffs: Dict[int, Any] = {}
    for c, d in coprime_cd(truncation):
        val = grp.act_rational(lm_matrix(c, d), mu.evaluate(INFINITY, ProjectiveRational(c, d)))
        coeffs[d] = grp.add(coeffs[d], val) if d in coeffs else val
    return FormalDirichletSeries(truncation, coeffs, grp)


def levy_function_of_measure(mu: PseudoMeasure) -> LevyFunction:
    """The transform's integrand: supported on the [0,1/2] intervals, value
    there the twisted mu(inf, c/d) divided by the interval length; the
    mirror side carries zero."""
    grp = mu.group

    def rule(c: int, d: int, side: int):
        if side == +1:
            return grp.zero()
        weight = Fraction(1) / (Fraction(1, d * (c + d)) if (c, d) != (1, 1) else Fraction(1, 2))
        val = grp.act_rational(lm_matrix(c, d), mu.evaluate(INFINITY, ProjectiveRational(c, d)))
        return grp.scalar_mul(weight, val)

    return LevyFunction(rule, grp, name=f"f[{mu.name}]")


def hecke_series(mu: PseudoMeasure, truncation: int) -> FormalDirichletSeries:
    """Right side of the transform identity: coefficients (T_n mu)(inf, 0)."""
    coeffs = {}
    for n in range(1, truncation + 1):
        coeffs[n] = hecke(mu, n).evaluate(INFINITY, 0)
    return FormalDirichletSeries(truncation, coeffs, mu.group)


@dataclass
class TransformReport:
    truncation: int
    rows: List[dict]
    ok: bool

    def to_json(self) -> dict:
        return {"truncation": self.truncation, "ok": self.ok, "rows": self.rows}


def verify_transform_identity(mu: PseudoMeasure, truncation: int) -> TransformReport:
    """Compare Z_plus * Z_minus * LM(mu) with the Hecke series coefficient by
    coefficient (exact equality in the value group)."""
    grp = mu.group
    lm = lm_transform(mu, truncation)
    zp, zm = z_plus_series(truncation), z_minus_series(truncation)
    zz = dirichlet_mul(zp, zm, groupring_mul,
                       add=groupring_add, zero=dict)
    lhs = dirichlet_mul(zz, lm, lambda g, v: groupring_apply(g, v, grp), group=grp)
    rhs = hecke_series(mu, truncation)
    rows = []
    ok = True
    for n in range(1, truncation + 1):
        equal = grp.eq(lhs.coeff(n), rhs.coeff(n))
        ok = ok and equal
        rows.append({"n": n,
                     "lhs": grp.value_to_json(lhs.coeff(n)),
                     "rhs": grp.value_to_json(rhs.coeff(n)),
                     "equal": equal})
    return TransformReport(truncation, rows, ok)


# ---------------------------------------------------------------------------
# the coset factorization behind the identity


def coset_factorization(n: int) -> List[dict]:
    """Unique factorization of each triangular representative (a, b; 0, d0)
    of determinant n as (d2, c*d1; 0, d*d1) with d*d1*d2 = n, (c, d)
    admissible; includes the exact three-matrix inverse factorization."""
    out = []
    for rep in hecke_cosets(n):
        a, b, d0 = int(rep.a), int(rep.b), int(rep.d)
        g = gcd(b, d0)
        c, d, d1, d2 = b // g, d0 // g, g, a
        assert d * d1 * d2 == n and (c < d or (c, d) == (1, 1))
        product = (RationalMatrix(Fraction(1, d2), 0, 0, 1)
                   * RationalMatrix(1, 0, 0, Fraction(1, d1))
                   * lm_matrix(c, d))
        out.append({"rep": rep, "c": c, "d": d, "d1": d1, "d2": d2,
                    "inverse_matches": product == rep.inverse()})
    return out
