"""Exact arithmetic on the rational boundary P^1(Q).

Points are reduced fractions with a single point at infinity written 1/0.
Matrices act by fractional linear (Moebius) maps.  Continued fractions are
kept in the canonical form whose last partial quotient is >= 2, which makes
expansions unique and ties rationals to their convergent matrices g_k.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

RationalLike = Union[int, Fraction, "ProjectiveRational"]


class ProjectiveRational:
    """A point of P^1(Q): reduced num/den with den >= 0 and infinity = 1/0."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        if isinstance(num, ProjectiveRational):
            num, den = num.num, num.den * den
        if isinstance(num, Fraction):
            num, den = num.numerator, num.denominator * den
        if not isinstance(num, int) or not isinstance(den, int):
            raise TypeError("ProjectiveRational expects integers or a Fraction")
        if num == 0 and den == 0:
            raise ValueError("(0, 0) is not a projective point")
        if den == 0:
            num = 1
        else:
            g = gcd(abs(num), abs(den))
            num //= g
            den //= g
            if den < 0:
                num, den = -num, -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):  # immutability
        raise AttributeError("ProjectiveRational is immutable")

    @property
    def is_infinity(self) -> bool:
        return self.den == 0

    def as_fraction(self) -> Fraction:
        if self.is_infinity:
            raise ValueError("infinity has no finite value")
        return Fraction(self.num, self.den)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ProjectiveRational(other)
        if not isinstance(other, ProjectiveRational):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __neg__(self) -> "ProjectiveRational":
        return ProjectiveRational(-self.num, self.den) if not self.is_infinity else self

    def __str__(self):
        if self.is_infinity:
            return "inf"
        if self.den == 1:
            return str(self.num)
        return f"{self.num}/{self.den}"

    def __repr__(self):
        return f"PR({self})"

    @staticmethod
    def parse(text: str) -> "ProjectiveRational":
        text = text.strip()
        if text in ("inf", "-inf", "oo", "infinity"):
            return INFINITY
        if "/" in text:
            p, q = text.split("/")
            return ProjectiveRational(int(p), int(q))
        return ProjectiveRational(int(text))


def as_point(x: RationalLike) -> ProjectiveRational:
    return x if isinstance(x, ProjectiveRational) else ProjectiveRational(x)


INFINITY = ProjectiveRational(1, 0)
ZERO = ProjectiveRational(0)
ONE = ProjectiveRational(1)


def cross(x: ProjectiveRational, y: ProjectiveRational) -> int:
    """Determinant of the column pair (x, y); |cross| = 1 marks Farey neighbours."""
    return x.num * y.den - y.num * x.den


class UnimodularMatrix:
    """Integer 2x2 matrix with determinant +-1, stored as its PSL representative.

    The representative negates all entries so that the bottom row (c, d) is
    lexicographically positive; this is harmless everywhere the library uses
    these matrices (Moebius maps and actions on -id-fixed value groups) and
    makes equality equality in PSL(2,Z).
    """

    __slots__ = ("a", "b", "c", "d", "det")

    def __init__(self, a: int, b: int, c: int, d: int):
        det = a * d - b * c
        if det not in (1, -1):
            raise ValueError(f"determinant {det} is not +-1")
        if (c, d) < (0, 0):  # lexicographic; (0, 0) cannot occur for det != 0
            a, b, c, d = -a, -b, -c, -d
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "det", det)

    def __setattr__(self, *a):
        raise AttributeError("UnimodularMatrix is immutable")

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __mul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "UnimodularMatrix":
        if self.det == 1:
            return UnimodularMatrix(self.d, -self.b, -self.c, self.a)
        return UnimodularMatrix(-self.d, self.b, self.c, -self.a)

    def __pow__(self, n: int) -> "UnimodularMatrix":
        m = self if n >= 0 else self.inverse()
        result = IDENTITY
        for _ in range(abs(n)):
            result = result * m
        return result

    def __call__(self, x: RationalLike) -> ProjectiveRational:
        x = as_point(x)
        return ProjectiveRational(self.a * x.num + self.b * x.den, self.c * x.num + self.d * x.den)

    def __eq__(self, other):
        if not isinstance(other, UnimodularMatrix):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self):
        return hash(self.entries())

    def sort_key(self):
        return self.entries()

    def __repr__(self):
        return f"U({self.a},{self.b};{self.c},{self.d})"


IDENTITY = UnimodularMatrix(1, 0, 0, 1)
SIGMA = UnimodularMatrix(0, -1, 1, 0)    # order 2: z -> -1/z
TAU = UnimodularMatrix(0, -1, 1, -1)     # order 3: 0 -> 1 -> inf -> 0
T_SHIFT = UnimodularMatrix(1, 1, 0, 1)   # z -> z + 1


class RationalMatrix:
    """Invertible 2x2 matrix over Q, used for the GL(2, Q) action."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        a, b, c, d = (Fraction(x) for x in (a, b, c, d))
        if a * d - b * c == 0:
            raise ValueError("singular matrix")
        for name, val in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, val)

    def __setattr__(self, *a):
        raise AttributeError("RationalMatrix is immutable")

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def has_positive_det(self) -> bool:
        return self.det > 0

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __mul__(self, other: "RationalMatrix") -> "RationalMatrix":
        return RationalMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "RationalMatrix":
        det = self.det
        return RationalMatrix(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def __call__(self, x: RationalLike) -> ProjectiveRational:
        x = as_point(x)
        num = self.a * x.num + self.b * x.den
        den = self.c * x.num + self.d * x.den
        # clear the rational denominators projectively
        scale = (num.denominator * den.denominator) // gcd(num.denominator, den.denominator)
        return ProjectiveRational(int(num * scale), int(den * scale))

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self):
        return hash(self.entries())

    @staticmethod
    def from_unimodular(g: UnimodularMatrix) -> "RationalMatrix":
        return RationalMatrix(*g.entries())

    def __repr__(self):
        return f"Q({self.a},{self.b};{self.c},{self.d})"


MatrixLike = Union[UnimodularMatrix, RationalMatrix]


def moebius(g: MatrixLike, x: RationalLike) -> ProjectiveRational:
    """Fractional linear action z -> (az+b)/(cz+d), projectively at infinity."""
    return g(as_point(x))


@dataclass(frozen=True)
class ContinuedFraction:
    """Canonical finite continued fraction k0 + 1/(k1 + 1/(... + 1/kn)).

    Partials are >= 1 and the last one is >= 2, so rationals have a unique
    expansion; an integer has no partials at all.
    """

    k0: int
    partials: tuple

    def __post_init__(self):
        if any((not isinstance(k, int)) or k < 1 for k in self.partials):
            raise ValueError("partials must be integers >= 1")
        if self.partials and self.partials[-1] < 2:
            raise ValueError("canonical form needs last partial >= 2")

    def value(self) -> Fraction:
        acc = Fraction(0)
        for k in reversed(self.partials):
            acc = 1 / (k + acc)
        return self.k0 + acc

    def __str__(self):
        inner = ",".join(str(k) for k in self.partials)
        return f"[{self.k0};{inner}]"

    @staticmethod
    def parse(text: str) -> "ContinuedFraction":
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise ValueError(f"bad continued fraction literal: {text!r}")
        head, _, tail = text[1:-1].partition(";")
        partials = tuple(int(t) for t in tail.split(",") if t.strip())
        return ContinuedFraction(int(head), partials)


def cf_expand(x: Union[int, Fraction]) -> ContinuedFraction:
    """Canonical continued fraction of a rational (total on Q)."""
    x = Fraction(x)
    k0 = x.numerator // x.denominator
    partials = []
    rest = x - k0
    while rest:
        y = 1 / rest
        k = y.numerator // y.denominator
        partials.append(k)
        rest = y - k
    # the Euclidean loop always ends with a partial >= 2 for non-integers
    return ContinuedFraction(k0, tuple(partials))


def convergents(x: Union[int, Fraction]) -> list:
    """Normalized convergents 1/0, p0/q0, ..., x of a rational."""
    cf = cf_expand(x)
    ps = [1, cf.k0]
    qs = [0, 1]
    for k in cf.partials:
        ps.append(k * ps[-1] + ps[-2])
        qs.append(k * qs[-1] + qs[-2])
    return [ProjectiveRational(p, q) for p, q in zip(ps, qs)]


def gk_matrices(x: Union[int, Fraction]) -> list:
    """Convergent matrices g_k = (p_k, (-1)^{k+1} p_{k+1}; q_k, (-1)^{k+1} q_{k+1}).

    Each has determinant +1 and sends (inf, 0) to the consecutive convergent
    pair (p_k/q_k, p_{k+1}/q_{k+1}); indices run k = -1, ..., n-1.
    """
    conv = convergents(x)
    ps = [c.num for c in conv]
    qs = [c.den for c in conv]
    out = []
    for k in range(-1, len(conv) - 2):
        s = -1 if (k % 2 == 0) else 1  # (-1)^(k+1)
        i = k + 1
        out.append(UnimodularMatrix(ps[i], s * ps[i + 1], qs[i], s * qs[i + 1]))
    return out


def psl_word(g: UnimodularMatrix) -> list:
    """Decompose g as a word in S = (0,-1;1,0) and T = (1,1;0,1) in PSL(2,Z).

    Returns [(sym, exponent), ...] whose left-to-right product is g, with
    sym in {"S", "T"}.  Uses the Euclidean algorithm on the first column.
    """
    if g.det != 1:
        raise ValueError("PSL words are defined for determinant +1")
    word = []
    a, b, c, d = g.entries()
    while c != 0:
        n = a // c  # floor division keeps the remainder in [0, |c|)
        word.append(("T", n))
        word.append(("S", 1))
        # g := S^{-1} T^{-n} g ; S^{-1} ~ (0,1;-1,0) in PSL
        a, b = a - n * c, b - n * d
        a, b, c, d = c, d, -a, -b
    # now the matrix is +-(1, m; 0, 1): a = d = +-1
    m = b if d == 1 else -b
    if m:
        word.append(("T", m))
    return word


def word_matrix(word: Iterable) -> UnimodularMatrix:
    out = IDENTITY
    for sym, n in word:
        out = out * (SIGMA if sym == "S" else T_SHIFT ** n)
    return out


def chain_points(points: Sequence[RationalLike]) -> list:
    return [as_point(p) for p in points]
