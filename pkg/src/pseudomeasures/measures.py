"""Finitely additive boundary measures over a pluggable abelian value group.

A pre-measure is a rule on primitive segments satisfying the antisymmetry
and triangle relations; once those hold on short loops the evaluation along
any primitive chain between two boundary points is chain-independent, which
is what turns a rule into an honest measure on pairs of boundary points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from .boundary import INFINITY, ProjectiveRational, RationalLike, RationalMatrix, UnimodularMatrix, as_point
from .chains import (
    PrimitiveChain,
    PrimitiveSegment,
    farey_triangles,
    loop_of_triangle,
    primitive_chain,
    primitive_segments,
)


class ValueGroup:
    """Abelian group of measure values; subclasses add scalars and actions.

    Required: zero/add/neg/eq.  Optional capabilities are discovered with
    `has_scalars` (rational scalar multiplication) and `has_action` /
    `has_rational_action` (left actions of PSL(2,Z) and GL(2,Q)).
    """

    name = "value-group"

    def zero(self):
        raise NotImplementedError

    def add(self, x, y):
        raise NotImplementedError

    def neg(self, x):
        return self.sub(self.zero(), x)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def eq(self, x, y) -> bool:
        raise NotImplementedError

    def is_zero(self, x) -> bool:
        return self.eq(x, self.zero())

    def total(self, values) -> Any:
        out = self.zero()
        for v in values:
            out = self.add(out, v)
        return out

    def int_mul(self, n: int, x):
        if self.has_scalars:
            return self.scalar_mul(Fraction(n), x)
        out = self.zero()
        step = x if n >= 0 else self.neg(x)
        for _ in range(abs(n)):
            out = self.add(out, step)
        return out

    # optional capabilities -------------------------------------------------
    @property
    def has_scalars(self) -> bool:
        return type(self).scalar_mul is not ValueGroup.scalar_mul

    def scalar_mul(self, q: Fraction, x):
        raise NotImplementedError(f"{self.name} has no rational scalars")

    @property
    def has_action(self) -> bool:
        return type(self).act is not ValueGroup.act

    def act(self, g: UnimodularMatrix, x):
        raise NotImplementedError(f"{self.name} has no PSL(2,Z) action")

    @property
    def has_rational_action(self) -> bool:
        return type(self).act_rational is not ValueGroup.act_rational

    def act_rational(self, g: RationalMatrix, x):
        raise NotImplementedError(f"{self.name} has no GL(2,Q) action")

    # codecs ---------------------------------------------------------------
    def value_to_json(self, x):
        raise NotImplementedError

    def value_from_json(self, data):
        raise NotImplementedError


class RationalValues(ValueGroup):
    """W = Q with the trivial group action."""

    name = "Q"

    def zero(self):
        return Fraction(0)

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def eq(self, x, y):
        return x == y

    def scalar_mul(self, q, x):
        return Fraction(q) * x

    def value_to_json(self, x):
        return str(x)

    def value_from_json(self, data):
        return Fraction(data)


class FormalSum:
    """Finite integer combination of boundary points (stored sparsely)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[ProjectiveRational, int]):
        object.__setattr__(self, "terms", {p: c for p, c in terms.items() if c})

    def __setattr__(self, *a):
        raise AttributeError("FormalSum is immutable")

    def __eq__(self, other):
        return isinstance(other, FormalSum) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def augmentation(self) -> int:
        return sum(self.terms.values())

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for p, c in sorted(self.terms.items(), key=lambda t: (t[0].den, t[0].num)):
            bits.append(f"{'+' if c >= 0 else '-'}{abs(c)}*[{p}]")
        return "".join(bits)


class FreeBoundaryValues(ValueGroup):
    """The universal value group: augmentation-zero sums of boundary points.

    PSL(2,Z) (and all of GL(2,Q)) acts by permuting the generators through
    the Moebius action on their labels.
    """

    name = "Z[P1(Q)]_0"

    def zero(self):
        return FormalSum({})

    def add(self, x: FormalSum, y: FormalSum):
        terms = dict(x.terms)
        for p, c in y.terms.items():
            terms[p] = terms.get(p, 0) + c
        return FormalSum(terms)

    def neg(self, x: FormalSum):
        return FormalSum({p: -c for p, c in x.terms.items()})

    def eq(self, x, y):
        return x == y

    def generator(self, p: RationalLike) -> FormalSum:
        return FormalSum({as_point(p): 1})

    def act(self, g, x: FormalSum):
        terms: Dict[ProjectiveRational, int] = {}
        for p, c in x.terms.items():
            q = g(p)
            terms[q] = terms.get(q, 0) + c
        return FormalSum(terms)

    def act_rational(self, g, x: FormalSum):
        return self.act(g, x)

    def value_to_json(self, x: FormalSum):
        return sorted([[str(p), c] for p, c in x.terms.items()])

    def value_from_json(self, data):
        return FormalSum({ProjectiveRational.parse(p): int(c) for p, c in data})


@dataclass(frozen=True)
class PreMeasure:
    """A value rule on primitive segments, to be validated and extended."""

    rule: Callable[[PrimitiveSegment], Any]
    group: ValueGroup
    name: str = "premeasure"


@dataclass
class Witness:
    kind: str
    data: Any
    lhs: Any = None


@dataclass
class ValidationReport:
    ok: bool
    checked_segments: int
    checked_triangles: int
    failures: List[Witness] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def validate_premeasure(pre: PreMeasure, depth: int = 12, window: Tuple[int, int] = (-2, 3),
                        max_failures: int = 5) -> ValidationReport:
    """Depth-bounded safety net for the pre-measure relations.

    `depth` bounds the denominators of the tested vertices.  Antisymmetry is
    checked on every enumerated segment and the triangle relation on every
    enumerated length-3 primitive loop; author-supplied rules should hold by
    construction, this check catches slips on a finite Farey neighbourhood.
    """
    grp = pre.group
    failures: List[Witness] = []
    nseg = 0
    for seg in primitive_segments(depth, *window):
        nseg += 1
        total = grp.add(pre.rule(seg), pre.rule(seg.reverse()))
        if not grp.is_zero(total):
            failures.append(Witness("antisymmetry", seg, total))
            if len(failures) >= max_failures:
                return ValidationReport(False, nseg, 0, failures)
    ntri = 0
    for tri in farey_triangles(depth, *window):
        ntri += 1
        loop = loop_of_triangle(tri)
        total = grp.total(pre.rule(s) for s in loop)
        if not grp.is_zero(total):
            failures.append(Witness("triangle", tri, total))
            if len(failures) >= max_failures:
                break
    return ValidationReport(not failures, nseg, ntri, failures)


class PseudoMeasure:
    """Chain-extended measure on ordered pairs of boundary points.

    Wraps a (validated) pre-measure rule; evaluation sums the rule along the
    canonical primitive chain and is chain-independent whenever the rule is
    a genuine pre-measure.  Values are memoized per segment and per pair;
    rules must be pure.
    """

    def __init__(self, pre: PreMeasure, name: Optional[str] = None):
        self.pre = pre
        self.name = name or pre.name
        self._seg_cache: Dict[PrimitiveSegment, Any] = {}
        self._pair_cache: Dict[Tuple[ProjectiveRational, ProjectiveRational], Any] = {}

    @property
    def group(self) -> ValueGroup:
        return self.pre.group

    def segment_value(self, seg: PrimitiveSegment):
        v = self._seg_cache.get(seg)
        if v is None:
            v = self.pre.rule(seg)
            self._seg_cache[seg] = v
        return v

    def evaluate(self, a: RationalLike, b: RationalLike):
        a, b = as_point(a), as_point(b)
        if a == b:
            return self.group.zero()
        key = (a, b)
        v = self._pair_cache.get(key)
        if v is None:
            chain = primitive_chain(a, b)
            v = self.group.total(self.segment_value(s) for s in chain)
            self._pair_cache[key] = v
        return v

    def evaluate_chain(self, chain: PrimitiveChain):
        return self.group.total(self.segment_value(s) for s in chain)

    def __call__(self, a: RationalLike, b: RationalLike):
        return self.evaluate(a, b)

    # group structure -------------------------------------------------------
    def __add__(self, other: "PseudoMeasure") -> "PseudoMeasure":
        if other.group is not self.group and type(other.group) is not type(self.group):
            raise ValueError("pseudo-measures over different value groups")
        grp = self.group
        rule = lambda seg: grp.add(self.segment_value(seg), other.segment_value(seg))
        return PseudoMeasure(PreMeasure(rule, grp, f"({self.name}+{other.name})"))

    def __neg__(self) -> "PseudoMeasure":
        grp = self.group
        return PseudoMeasure(PreMeasure(lambda seg: grp.neg(self.segment_value(seg)), grp, f"(-{self.name})"))

    def __sub__(self, other: "PseudoMeasure") -> "PseudoMeasure":
        return self + (-other)

    def scaled(self, q: Fraction) -> "PseudoMeasure":
        grp = self.group
        return PseudoMeasure(PreMeasure(lambda seg: grp.scalar_mul(q, self.segment_value(seg)), grp,
                                        f"({q}*{self.name})"))

    # boundary action ---------------------------------------------------------
    def right_action(self, g) -> "PseudoMeasure":
        """(mu g)(a, b) = mu(g a, g b); g may be any invertible rational matrix."""
        rule = lambda seg: self.evaluate(g(seg.a), g(seg.b))
        return PseudoMeasure(PreMeasure(rule, self.group, f"({self.name}.g)"))

    def involution_image(self) -> "PseudoMeasure":
        return self.right_action(RationalMatrix(-1, 0, 0, 1))

    def even_part(self) -> "PseudoMeasure":
        return (self + self.involution_image()).scaled(Fraction(1, 2))

    def odd_part(self) -> "PseudoMeasure":
        return (self - self.involution_image()).scaled(Fraction(1, 2))


def zero_measure(group: ValueGroup) -> PseudoMeasure:
    return PseudoMeasure(PreMeasure(lambda seg: group.zero(), group, "zero"))


def universal_measure() -> PseudoMeasure:
    """The universal measure (a, b) -> [b] - [a] over augmentation-zero sums."""
    grp = FreeBoundaryValues()
    rule = lambda seg: FormalSum({seg.b: 1, seg.a: -1}) if seg.a != seg.b else grp.zero()
    return PseudoMeasure(PreMeasure(rule, grp, "universal"))


def factor_through_universal(mu: PseudoMeasure) -> Callable[[FormalSum], Any]:
    """Homomorphism w on augmentation-zero sums with mu = w o universal."""
    base = INFINITY

    def w(value: FormalSum):
        if value.augmentation() != 0:
            raise ValueError("value is not augmentation-zero")
        grp = mu.group
        out = grp.zero()
        for p, c in value.terms.items():
            out = grp.add(out, grp.int_mul(c, mu.evaluate(base, p)))
        return out

    return w


def measure_fixture(mu: PseudoMeasure, segments) -> list:
    """Golden-test fixture: [{segment, value}] with the group's value codec."""
    out = []
    for seg in segments:
        out.append({"segment": [str(seg.a), str(seg.b)],
                    "value": mu.group.value_to_json(mu.segment_value(seg))})
    return out
