"""Multiplicative (non-commutative) boundary measures.

A rule J on ordered pairs of boundary points with values in a group must
satisfy J at equal points = 1, reversal = inverse, and triangle products
= 1; evaluation along a chain is the right-to-left ordered product, with
the first chain segment contributing the rightmost factor.  Models here:
the free group on finite rationals (the universal case), and truncated
tensor series built from exact iterated integrals of step forms along real
segments, whose group-like structure encodes all shuffle relations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .boundary import INFINITY, SIGMA, TAU, ProjectiveRational, UnimodularMatrix, as_point
from .chains import PrimitiveSegment, farey_triangles, loop_of_triangle, primitive_chain, primitive_segments, segment_matrix
from .linalg import solve
from .measures import ValueGroup


class GroupValue:
    """Protocol for (not necessarily commutative) value groups."""

    name = "group"

    def identity(self):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def eq(self, x, y) -> bool:
        raise NotImplementedError

    def is_identity(self, x) -> bool:
        return self.eq(x, self.identity())

    def product(self, factors) -> Any:
        out = self.identity()
        for f in factors:
            out = self.mul(out, f)
        return out

    @property
    def has_action(self) -> bool:
        return type(self).act is not GroupValue.act

    def act(self, g: UnimodularMatrix, x):
        raise NotImplementedError(f"{self.name} has no PSL(2,Z) action")


class AbelianAsGroup(GroupValue):
    """View an abelian value group multiplicatively (x.y := x + y)."""

    def __init__(self, base: ValueGroup):
        self.base = base
        self.name = f"mult({base.name})"

    def identity(self):
        return self.base.zero()

    def mul(self, x, y):
        return self.base.add(x, y)

    def inv(self, x):
        return self.base.neg(x)

    def eq(self, x, y):
        return self.base.eq(x, y)

    def act(self, g, x):
        return self.base.act(g, x)


class FreeGroup(GroupValue):
    """Free group on generators labelled by finite rationals; the label for
    infinity is the empty word.  Words are reduced tuples (label, exponent)."""

    name = "free"

    def identity(self):
        return ()

    def generator(self, p) -> tuple:
        p = as_point(p)
        if p.is_infinity:
            return ()
        return ((p, 1),)

    def mul(self, x, y):
        out = list(x)
        for gen, e in y:
            if out and out[-1][0] == gen:
                s = out[-1][1] + e
                out.pop()
                if s:
                    out.append((gen, s))
            else:
                out.append((gen, e))
        return tuple(out)

    def inv(self, x):
        return tuple((gen, -e) for gen, e in reversed(x))

    def eq(self, x, y):
        return x == y


# ---------------------------------------------------------------------------
# truncated tensor groups


class TruncatedTensor:
    """1 + sum of graded components, graded degree <= order.

    Component k is a flat tuple of Fraction of length dim**k, indexed by
    multi-indices in row-major order.  The degree-0 scalar is fixed at 1
    for group elements."""

    __slots__ = ("order", "dim", "levels")

    def __init__(self, order: int, dim: int, levels: Sequence[tuple]):
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "levels", tuple(levels))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def component(self, k: int) -> tuple:
        return self.levels[k]

    def entry(self, index: Tuple[int, ...]) -> Fraction:
        k = len(index)
        flat = 0
        for i in index:
            flat = flat * self.dim + i
        return self.levels[k][flat] if k <= self.order else Fraction(0)

    def __eq__(self, other):
        return (isinstance(other, TruncatedTensor) and self.order == other.order
                and self.dim == other.dim and self.levels == other.levels)

    def __hash__(self):
        return hash((self.order, self.dim, self.levels))

    def __repr__(self):
        return f"Tensor(order={self.order}, dim={self.dim}, deg1={self.levels[1] if self.order >= 1 else ()})"


class TruncatedTensorGroup(GroupValue):
    """Group of tensors 1 + (positive degree) under truncated multiplication.

    An optional degree-1 action matrix provider extends a base action
    diagonally to every tensor level, which is how PSL(2,Z) acts on
    iterated-integral values.
    """

    def __init__(self, order: int, dim: int,
                 action_matrix: Optional[Callable[[UnimodularMatrix], Sequence[Sequence[Fraction]]]] = None):
        if order < 0 or dim < 0:
            raise ValueError("bad truncation data")
        self.order = order
        self.dim = dim
        self._action_matrix = action_matrix
        self.name = f"tensor(order={order}, dim={dim})"

    def identity(self) -> TruncatedTensor:
        levels = [tuple([Fraction(1)])]
        for k in range(1, self.order + 1):
            levels.append(tuple([Fraction(0)] * (self.dim ** k)))
        return TruncatedTensor(self.order, self.dim, levels)

    def from_levels(self, levels: Sequence[Sequence[Fraction]]) -> TruncatedTensor:
        fixed = [tuple([Fraction(1)])]
        for k in range(1, self.order + 1):
            want = self.dim ** k
            lvl = tuple(Fraction(x) for x in (levels[k] if k < len(levels) else []))
            if len(lvl) != want:
                raise ValueError(f"level {k} needs {want} entries")
            fixed.append(lvl)
        return TruncatedTensor(self.order, self.dim, fixed)

    def mul(self, x: TruncatedTensor, y: TruncatedTensor) -> TruncatedTensor:
        d = self.dim
        levels = [tuple([x.levels[0][0] * y.levels[0][0]])]
        for k in range(1, self.order + 1):
            out = [Fraction(0)] * (d ** k)
            for i in range(0, k + 1):
                xi = x.levels[i]
                yj = y.levels[k - i]
                # concatenated index: x-part the leading block
                for a, xa in enumerate(xi):
                    if xa:
                        base = a * (d ** (k - i))
                        for b, yb in enumerate(yj):
                            if yb:
                                out[base + b] += xa * yb
            levels.append(tuple(out))
        return TruncatedTensor(self.order, d, levels)

    def inv(self, x: TruncatedTensor) -> TruncatedTensor:
        # Neumann series: (1 + n)^{-1} = 1 - n + n^2 - ...; n is nilpotent here
        n = self.sub_one(x)
        out = self.identity()
        term = self.identity()
        for k in range(1, self.order + 1):
            term = self.mul(term, n)
            out = self._add(out, term, sign=(-1) ** k)
        return out

    def _add(self, x: TruncatedTensor, y: TruncatedTensor, sign: int = 1) -> TruncatedTensor:
        levels = []
        for k in range(0, self.order + 1):
            levels.append(tuple(a + sign * b for a, b in zip(x.levels[k], y.levels[k])))
        return TruncatedTensor(self.order, self.dim, levels)

    def sub_one(self, x: TruncatedTensor) -> TruncatedTensor:
        """The positive-degree part (scalar dropped to 0)."""
        levels = [tuple([Fraction(0)])] + [x.levels[k] for k in range(1, self.order + 1)]
        return TruncatedTensor(self.order, self.dim, levels)

    def eq(self, x, y):
        return x == y

    def act(self, g: UnimodularMatrix, x: TruncatedTensor) -> TruncatedTensor:
        if self._action_matrix is None:
            raise NotImplementedError("no base action configured")
        m = self._action_matrix(g)
        d = self.dim
        levels = [x.levels[0]]
        for k in range(1, self.order + 1):
            src = x.levels[k]
            out = [Fraction(0)] * (d ** k)
            for idx in range(d ** k):
                v = src[idx]
                if not v:
                    continue
                digits = []
                t = idx
                for _ in range(k):
                    digits.append(t % d)
                    t //= d
                digits.reverse()
                # tensor-power action: distribute over each slot
                targets = [(0, v)]
                for pos, j in enumerate(digits):
                    new_targets = []
                    for flat, coeff in targets:
                        for i in range(d):
                            mij = m[i][j]
                            if mij:
                                new_targets.append((flat * d + i, coeff * mij))
                    targets = new_targets
                for flat, coeff in targets:
                    out[flat] += coeff
            levels.append(tuple(out))
        return TruncatedTensor(self.order, d, levels)


# note: mul of sub_one'd tensors keeps scalar bookkeeping out of _add via the
# explicit sign argument above; identity scalars never mix into levels >= 1.


# ---------------------------------------------------------------------------
# exact piecewise polynomial calculus for iterated step integrals


class PiecewisePoly:
    """Piecewise polynomial on [cuts[0], cuts[-1]], zero outside; pieces[i]
    holds the coefficient list (low degree first) on (cuts[i], cuts[i+1])."""

    __slots__ = ("cuts", "pieces")

    def __init__(self, cuts: Sequence[Fraction], pieces: Sequence[Sequence[Fraction]]):
        object.__setattr__(self, "cuts", tuple(Fraction(c) for c in cuts))
        object.__setattr__(self, "pieces", tuple(tuple(Fraction(x) for x in p) for p in pieces))
        if len(self.cuts) != len(self.pieces) + 1:
            raise ValueError("cuts/pieces mismatch")

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def eval_at(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        if x <= self.cuts[0] or x >= self.cuts[-1]:
            # closed evaluation at the hull ends uses the adjoining piece
            if x < self.cuts[0] or x > self.cuts[-1]:
                return Fraction(0)
        for i in range(len(self.pieces)):
            if self.cuts[i] <= x <= self.cuts[i + 1]:
                return _poly_at(self.pieces[i], x)
        return Fraction(0)


def _poly_at(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def _poly_antiderivative(coeffs: Sequence[Fraction]) -> List[Fraction]:
    return [Fraction(0)] + [c / (i + 1) for i, c in enumerate(coeffs)]


@dataclass(frozen=True)
class StepForm:
    """Piecewise constant form: value values[i] on (cuts[i], cuts[i+1])."""

    cuts: Tuple[Fraction, ...]
    values: Tuple[Fraction, ...]

    @staticmethod
    def indicator(lo, hi) -> "StepForm":
        lo, hi = Fraction(lo), Fraction(hi)
        if not lo < hi:
            raise ValueError("need lo < hi")
        return StepForm((lo, hi), (Fraction(1),))

    @staticmethod
    def from_breaks(cuts: Sequence, values: Sequence) -> "StepForm":
        cuts = tuple(Fraction(c) for c in cuts)
        values = tuple(Fraction(v) for v in values)
        if len(cuts) != len(values) + 1 or any(a >= b for a, b in zip(cuts, cuts[1:])):
            raise ValueError("bad step form data")
        return StepForm(cuts, values)

    def to_json(self) -> dict:
        return {"cuts": [str(c) for c in self.cuts], "values": [str(v) for v in self.values]}

    @staticmethod
    def from_json(data) -> "StepForm":
        return StepForm.from_breaks([Fraction(c) for c in data["cuts"]],
                                    [Fraction(v) for v in data["values"]])


def _merge_cuts(*cut_lists) -> List[Fraction]:
    out = sorted(set(itertools.chain.from_iterable(cut_lists)))
    return out


def _restrict_multiply(pp: PiecewisePoly, form: StepForm) -> PiecewisePoly:
    """Pointwise product of a piecewise polynomial with a step form."""
    cuts = _merge_cuts(pp.cuts, form.cuts)
    pieces = []
    for a, b in zip(cuts, cuts[1:]):
        mid_num = a + (b - a) / 2
        fval = _step_value(form, mid_num)
        if fval == 0:
            pieces.append(())
            continue
        poly = _pp_piece(pp, mid_num)
        pieces.append(tuple(fval * c for c in poly))
    return PiecewisePoly(cuts, pieces)


def _step_value(form: StepForm, x: Fraction) -> Fraction:
    for i in range(len(form.values)):
        if form.cuts[i] < x < form.cuts[i + 1]:
            return form.values[i]
    return Fraction(0)


def _pp_piece(pp: PiecewisePoly, x: Fraction) -> Tuple[Fraction, ...]:
    for i in range(len(pp.pieces)):
        if pp.cuts[i] < x < pp.cuts[i + 1]:
            return pp.pieces[i]
    return ()


def _integrate_from(pp: PiecewisePoly, a: Fraction) -> PiecewisePoly:
    """Continuous antiderivative H(t) = integral from a to t, as a piecewise
    polynomial on the hull extended to include a; constant past the hull."""
    cuts = _merge_cuts(pp.cuts, [a])
    acc = Fraction(0)
    pieces = []
    started = False
    # left of a the value is minus the integral from t to a; handle by a
    # single pass accumulating from the leftmost cut with offset fixed at a.
    values_at = {cuts[0]: Fraction(0)}
    running = Fraction(0)
    for i, (lo, hi) in enumerate(zip(cuts, cuts[1:])):
        mid = lo + (hi - lo) / 2
        poly = _pp_piece(pp, mid)
        anti = _poly_antiderivative(poly) if poly else (Fraction(0),)
        # piece of H relative to the left end: H(t) = running + anti(t) - anti(lo)
        shift = running - _poly_at(anti, lo)
        piece = list(anti)
        piece[0] += shift
        pieces.append(tuple(piece))
        running = _poly_at(anti, hi) + shift
    raw = PiecewisePoly(cuts, pieces)
    offset = raw.eval_at(Fraction(a))
    shifted = [tuple((c - offset if i == 0 else c) for i, c in enumerate(p)) for p in raw.pieces]
    return PiecewisePoly(cuts, shifted)


def iterated_step_integral(a, b, intervals: Sequence[Tuple[Fraction, Fraction]]) -> Fraction:
    """Exact integral of the product of interval indicators over the ordered
    simplex b > z1 > ... > zn > a, with f_k = indicator(intervals[k]); the
    first interval binds the outermost variable z1."""
    forms = [StepForm.indicator(lo, hi) for lo, hi in intervals]
    return iterated_step_form_integral(a, b, forms)


def iterated_step_form_integral(a, b, forms: Sequence[StepForm]) -> Fraction:
    """Iterated integral of general step forms, innermost form last."""
    if not forms:
        return Fraction(1)
    hull = _merge_cuts(*[f.cuts for f in forms])
    lo = hull[0] - 1
    hi = hull[-1] + 1
    # the integrand vanishes outside the hull, so infinite or distant bounds
    # clamp to one unit beyond it without changing the value
    av = lo if a == "-inf" else max(min(Fraction(a), hi), lo)
    bv = hi if b == "+inf" else max(min(Fraction(b), hi), lo)
    if av >= bv:
        return Fraction(0)
    # inner-to-outer accumulation: H_n(t) = int_a^t f_n, then multiply inward
    h = PiecewisePoly((av, bv), ((Fraction(1),),))
    h = _restrict_multiply(h, forms[-1])
    h = _integrate_from(h, av)
    for form in reversed(forms[:-1]):
        h = _restrict_multiply(h, form)
        h = _integrate_from(h, av)
    return h.eval_at(bv)


# ---------------------------------------------------------------------------
# non-commutative measures


class NCPseudoMeasure:
    """Group-valued rule on primitive segments, evaluated along chains by the
    right-to-left ordered product (first segment = rightmost factor)."""

    def __init__(self, rule: Callable[[PrimitiveSegment], Any], group: GroupValue, name: str = "nc"):
        self.rule = rule
        self.group = group
        self.name = name
        self._seg_cache: Dict[PrimitiveSegment, Any] = {}
        self._pair_cache: Dict[Tuple[ProjectiveRational, ProjectiveRational], Any] = {}

    def segment_value(self, seg: PrimitiveSegment):
        v = self._seg_cache.get(seg)
        if v is None:
            v = self.rule(seg)
            self._seg_cache[seg] = v
        return v

    def evaluate(self, a, b):
        a, b = as_point(a), as_point(b)
        if a == b:
            return self.group.identity()
        key = (a, b)
        v = self._pair_cache.get(key)
        if v is None:
            chain = primitive_chain(a, b)
            v = self.evaluate_chain(chain)
            self._pair_cache[key] = v
        return v

    def evaluate_chain(self, chain):
        out = self.group.identity()
        for seg in chain:  # later segments multiply on the left
            out = self.group.mul(self.segment_value(seg), out)
        return out

    def __call__(self, a, b):
        return self.evaluate(a, b)

    def inverse_measure(self) -> "NCPseudoMeasure":
        grp = self.group
        return NCPseudoMeasure(lambda seg: grp.inv(self.segment_value(seg.reverse())),
                               grp, name=f"(inv {self.name})")

    def right_action(self, g) -> "NCPseudoMeasure":
        return NCPseudoMeasure(lambda seg: self.evaluate(g(seg.a), g(seg.b)), self.group,
                               name=f"({self.name}.g)")


def universal_nc_measure() -> NCPseudoMeasure:
    grp = FreeGroup()
    rule = lambda seg: grp.mul(grp.generator(seg.b), grp.inv(grp.generator(seg.a)))
    return NCPseudoMeasure(rule, grp, name="nc-universal")


@dataclass
class NCValidationReport:
    ok: bool
    checked_segments: int
    checked_triangles: int
    witnesses: List[Any]

    def __bool__(self):
        return self.ok


def nc_validate(measure: NCPseudoMeasure, depth: int = 8, window: Tuple[int, int] = (-2, 3),
                max_failures: int = 3) -> NCValidationReport:
    """Multiplicative pre-measure relations on short loops: reversal gives
    inverses and triangle products collapse to the identity."""
    grp = measure.group
    wit = []
    nseg = 0
    for seg in primitive_segments(depth, *window):
        nseg += 1
        prod = grp.mul(measure.segment_value(seg.reverse()), measure.segment_value(seg))
        if not grp.is_identity(prod):
            wit.append(("reversal", seg))
            if len(wit) >= max_failures:
                return NCValidationReport(False, nseg, 0, wit)
    ntri = 0
    for tri in farey_triangles(depth, *window):
        ntri += 1
        loop = loop_of_triangle(tri)
        prod = grp.identity()
        for seg in loop:
            prod = grp.mul(measure.segment_value(seg), prod)
        if not grp.is_identity(prod):
            wit.append(("triangle", tri))
            if len(wit) >= max_failures:
                break
    return NCValidationReport(not wit, nseg, ntri, wit)


def nc_reciprocity_validate(rule: Callable[[int, int], Any], group: GroupValue, bound: int = 25) -> bool:
    """R(p+q, q) . R(p, p+q) = R(p, q) on coprime positive pairs up to bound."""
    from math import gcd
    for p in range(1, bound + 1):
        for q in range(1, bound + 1 - p):
            if gcd(p, q) != 1:
                continue
            lhs = group.mul(rule(p + q, q), rule(p, p + q))
            if not group.eq(lhs, rule(p, q)):
                return False
    return True


def nc_check_seed(group: GroupValue, u) -> bool:
    """sigma[u] . u = 1 and tau^2[u] . tau[u] . u = 1."""
    s = group.mul(group.act(SIGMA, u), u)
    t = group.mul(group.act(TAU * TAU, u), group.mul(group.act(TAU, u), u))
    return group.is_identity(s) and group.is_identity(t)


def nc_from_seed(group: GroupValue, u, validate_depth: int = 0) -> NCPseudoMeasure:
    """Modular non-commutative measure with value u at (inf, 0):
    the rule sends (g inf, g 0) to g[u]."""
    if not nc_check_seed(group, u):
        raise ValueError("seed must satisfy the sigma and tau conditions")
    rule = lambda seg: group.act(segment_matrix(seg), u)
    j = NCPseudoMeasure(rule, group, name="nc-seed")
    if validate_depth:
        rep = nc_validate(j, validate_depth)
        if not rep:
            raise ValueError(f"seed rule failed validation: {rep.witnesses[:1]}")
    return j


class NCCocycle:
    """c_alpha(g) = J from (g alpha) to alpha; c(gh) = c(g) . g[c(h)]."""

    def __init__(self, j: NCPseudoMeasure, alpha):
        self.j = j
        self.alpha = as_point(alpha)

    def __call__(self, g: UnimodularMatrix):
        return self.j.evaluate(g(self.alpha), self.alpha)

    def verify_relation(self, g, h) -> bool:
        grp = self.j.group
        lhs = self(g * h)
        rhs = grp.mul(self(g), grp.act(g, self(h)))
        return grp.eq(lhs, rhs)


def nc_cocycle(j: NCPseudoMeasure, alpha) -> NCCocycle:
    return NCCocycle(j, alpha)


def basepoint_change_matches(j: NCPseudoMeasure, alpha, beta, g) -> bool:
    """c_beta(g) = J_alpha^beta . c_alpha(g) . (g J_alpha^beta)^{-1}."""
    grp = j.group
    c_a = nc_cocycle(j, alpha)
    c_b = nc_cocycle(j, beta)
    jab = j.evaluate(alpha, beta)
    g_jab = j.evaluate(g(as_point(alpha)), g(as_point(beta)))
    rhs = grp.mul(jab, grp.mul(c_a(g), grp.inv(g_jab)))
    return grp.eq(c_b(g), rhs)


# ---------------------------------------------------------------------------
# iterated-integral measures over truncated tensors


def _real_coordinate(p: ProjectiveRational):
    """Boundary point as an extended real: infinity sits at +inf, so every
    ordered pair becomes an oriented interval of the line and all chain
    relations telescope."""
    return "+inf" if p.is_infinity else p.as_fraction()


def chen_series(group: TruncatedTensorGroup, forms: Sequence[StepForm], a, b) -> TruncatedTensor:
    """1 + sum over words of the iterated integrals from a to b (a < b)."""
    levels: List[tuple] = [(Fraction(1),)]
    d = group.dim
    for k in range(1, group.order + 1):
        vals = []
        for idx in itertools.product(range(d), repeat=k):
            vals.append(iterated_step_form_integral(a, b, [forms[i] for i in idx]))
        levels.append(tuple(vals))
    return group.from_levels(levels)


def iterated_measure(forms: Sequence[StepForm], order: int,
                     action_matrix=None) -> NCPseudoMeasure:
    """The multiplicative measure of iterated step-form integrals.

    The degree-n entry at multi-index (i1..in) of the value on (a, b) is the
    iterated integral of forms[i1] .. forms[in] along the oriented segment;
    pairs running against the line orientation contribute the group inverse,
    so all loop products cancel exactly.
    """
    group = TruncatedTensorGroup(order, len(forms), action_matrix)

    def rule(seg: PrimitiveSegment):
        ra, rb = _real_coordinate(seg.a), _real_coordinate(seg.b)
        if ra == "+inf":
            forward = False        # path runs down the line from +inf
        elif rb == "+inf":
            forward = True
        else:
            forward = ra < rb
        if forward:
            return chen_series(group, forms, ra, rb)
        return group.inv(chen_series(group, forms, rb, ra))

    return NCPseudoMeasure(rule, group, name=f"iterated(order={order})")


def shuffle_identities_order2(j: NCPseudoMeasure, a, b) -> bool:
    """J(1)(i) J(1)(j) = J(2)(i,j) + J(2)(j,i) for all index pairs."""
    v = j.evaluate(a, b)
    d = v.dim
    if v.order < 2:
        return True
    for i in range(d):
        for k in range(d):
            lhs = v.entry((i,)) * v.entry((k,))
            rhs = v.entry((i, k)) + v.entry((k, i))
            if lhs != rhs:
                return False
    return True


def shuffle_identities_order3(j: NCPseudoMeasure, a, b) -> bool:
    """J(1)(i) J(2)(k,l) = sum of the three shuffles of i into (k,l)."""
    v = j.evaluate(a, b)
    d = v.dim
    if v.order < 3:
        return True
    for i in range(d):
        for k in range(d):
            for l in range(d):
                lhs = v.entry((i,)) * v.entry((k, l))
                rhs = v.entry((i, k, l)) + v.entry((k, i, l)) + v.entry((k, l, i))
                if lhs != rhs:
                    return False
    return True


def group_like(v: TruncatedTensor) -> bool:
    """All shuffle identities available at the truncation order."""
    d = v.dim
    ok = True
    if v.order >= 2:
        for i in range(d):
            for k in range(d):
                if v.entry((i,)) * v.entry((k,)) != v.entry((i, k)) + v.entry((k, i)):
                    return False
    if v.order >= 3:
        for i in range(d):
            for k in range(d):
                for l in range(d):
                    lhs = v.entry((i,)) * v.entry((k, l))
                    if lhs != v.entry((i, k, l)) + v.entry((k, i, l)) + v.entry((k, l, i)):
                        return False
    return ok


# ---------------------------------------------------------------------------
# modular tensor seeds of order 2 over the polynomial module


def order2_modular_seed(module) -> Optional[TruncatedTensor]:
    """Solve for u = 1 + w + eta with w a degree-1 seed of the module and
    eta a degree-2 correction so that the multiplicative seed conditions
    hold; existence comes from the vanishing of the relevant degree-2
    obstruction for the free product Z/2 * Z/3."""
    from .modular import seed_space

    basis = seed_space(module)
    if not basis:
        return None
    omega = basis[0]
    return order2_seed_from_degree1(module, omega)


def order2_seed_from_degree1(module, omega) -> TruncatedTensor:
    d = module.dim
    group = TruncatedTensorGroup(2, d, module.action_matrix)

    def kron(m):
        n = len(m)
        out = [[Fraction(0)] * (n * n) for _ in range(n * n)]
        for i in range(n):
            for j in range(n):
                if not m[i][j]:
                    continue
                for k in range(n):
                    for l in range(n):
                        if m[k][l]:
                            out[i * n + k][j * n + l] = m[i][j] * m[k][l]
        return out

    def tensor2(x, y):
        return [Fraction(xi) * Fraction(yj) for xi in x for yj in y]

    ms = module.action_matrix(SIGMA)
    mt = module.action_matrix(TAU)
    mt2 = module.action_matrix(TAU * TAU)
    n2 = d * d
    ident = [[Fraction(1 if i == j else 0) for j in range(n2)] for i in range(n2)]
    ks, kt, kt2 = kron(ms), kron(mt), kron(mt2)
    s_omega = [sum(ms[i][j] * omega[j] for j in range(d)) for i in range(d)]
    t_omega = [sum(mt[i][j] * omega[j] for j in range(d)) for i in range(d)]
    t2_omega = [sum(mt2[i][j] * omega[j] for j in range(d)) for i in range(d)]
    # (1 + sigma) eta = -(sigma w (X) w) ; (1 + tau + tau^2) eta = -(t2w (X) tw + t2w (X) w + tw (X) w)
    rows = []
    rhs = []
    for i in range(n2):
        rows.append([ident[i][j] + ks[i][j] for j in range(n2)])
        rhs.append(-tensor2(s_omega, list(omega))[i])
    for i in range(n2):
        rows.append([ident[i][j] + kt[i][j] + kt2[i][j] for j in range(n2)])
        val = (tensor2(t2_omega, t_omega)[i] + tensor2(t2_omega, list(omega))[i]
               + tensor2(t_omega, list(omega))[i])
        rhs.append(-val)
    eta = solve(rows, rhs)
    if eta is None:
        raise RuntimeError("degree-2 obstruction did not vanish")
    u = group.from_levels([(Fraction(1),), tuple(omega), tuple(eta)])
    assert nc_check_seed(group, u)
    return u
