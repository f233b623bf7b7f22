"""The tree of PSL(2,Z), currents on its edges, and boundary integration.

Edges of the tree correspond bijectively to group elements: the edge of g
joins the center of the triangle g{0,1,inf} to the midpoint of its side
{g(inf), g(0)}.  An outward edge carries the boundary arc (g inf, g 0); the
reversed edge carries the complementary arc.  A current assigns values to
oriented edges with reversal antisymmetry and zero net flow at every vertex;
this is the same data as a finitely additive boundary measure.

Locally constant integer functions on the boundary are stored as integer
combinations of arc indicators; their canonical form is the value vector on
the circular partition cut at all endpoints, which makes equality,
composition with Moebius maps and integration against measures exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .boundary import INFINITY, IDENTITY, SIGMA, TAU, ProjectiveRational, UnimodularMatrix, as_point
from .chains import PrimitiveSegment, segment_matrix
from .measures import PreMeasure, PseudoMeasure, ValueGroup
from .modular import from_seed, check_seed


# ---------------------------------------------------------------------------
# circular order on the boundary (infinity first, then the reals)


def _circle_key(p: ProjectiveRational):
    return (0,) if p.is_infinity else (1, p.as_fraction())


def arc_contains(seg: PrimitiveSegment, x: ProjectiveRational, closed: bool = True) -> bool:
    """Membership of x in the arc swept from seg.a to seg.b in circular order."""
    a, b, x = seg.a, seg.b, as_point(x)
    if x == a or x == b:
        return closed
    ka, kb, kx = _circle_key(a), _circle_key(b), _circle_key(x)
    if ka < kb:
        return ka < kx < kb
    return kx > ka or kx < kb


def arc_interior_sample(a: ProjectiveRational, b: ProjectiveRational) -> ProjectiveRational:
    """A boundary point strictly inside the arc from a to b (circular order)."""
    ka, kb = _circle_key(a), _circle_key(b)
    if ka < kb:
        if a.is_infinity:  # (inf, b): the reals below b
            return ProjectiveRational(b.num - b.den, b.den)
        mid = (a.as_fraction() + b.as_fraction()) / 2
        return ProjectiveRational(mid)
    if b.is_infinity:      # (a, inf): the reals above a
        return ProjectiveRational(a.num + a.den, a.den)
    return INFINITY        # finite a > b: the arc passes through infinity


def arc_split_point(seg: PrimitiveSegment) -> ProjectiveRational:
    """The Farey mediant-type point splitting the arc into its two children
    in the tessellation (the image of -1 under the segment's matrix)."""
    return segment_matrix(seg)(ProjectiveRational(-1))


# ---------------------------------------------------------------------------
# tree edges and currents


@dataclass(frozen=True)
class TreeEdge:
    """Oriented edge of the tree, named by its group element.

    `outward` means from the triangle center toward the side midpoint; the
    boundary arc of an outward edge is (g inf, g 0) and reversal swaps the
    arc's ends.  The slot-based constructor folds the three sides of one
    triangle onto the canonical element `gamma * tau^slot`.
    """

    element: UnimodularMatrix
    outward: bool = True

    @staticmethod
    def from_triangle(gamma: UnimodularMatrix, slot: int, outward: bool = True) -> "TreeEdge":
        return TreeEdge(gamma * TAU ** (slot % 3), outward)

    def reverse(self) -> "TreeEdge":
        return TreeEdge(self.element, not self.outward)

    def interval(self) -> PrimitiveSegment:
        g = self.element
        a, b = g(INFINITY), g(ProjectiveRational(0))
        return PrimitiveSegment(a, b) if self.outward else PrimitiveSegment(b, a)

    def center_vertex(self):
        return _triangle_id(self.element)

    def midpoint_vertex(self):
        return _midpoint_id(self.element)

    def source_vertex(self):
        return self.center_vertex() if self.outward else self.midpoint_vertex()


def _triangle_id(g: UnimodularMatrix):
    return ("tri", min((g, g * TAU, g * TAU * TAU), key=lambda m: m.sort_key()))

def _midpoint_id(g: UnimodularMatrix):
    return ("mid", min((g, g * SIGMA), key=lambda m: m.sort_key()))


def edge_for_segment(seg: PrimitiveSegment) -> TreeEdge:
    """The outward oriented edge whose arc is the given ordered segment."""
    return TreeEdge(segment_matrix(seg), True)


def edges_at_vertex(vertex) -> List[TreeEdge]:
    """Outgoing oriented edges at a vertex id."""
    kind, g = vertex
    if kind == "tri":
        return [TreeEdge(g, True), TreeEdge(g * TAU, True), TreeEdge(g * TAU * TAU, True)]
    return [TreeEdge(g, False), TreeEdge(g * SIGMA, False)]


class Current:
    """Value rule on oriented edges; orientation reversal negates and the
    outgoing values at every vertex sum to zero."""

    def __init__(self, rule: Callable[[TreeEdge], Any], group: ValueGroup, name: str = "current"):
        self.rule = rule
        self.group = group
        self.name = name

    def __call__(self, e: TreeEdge):
        return self.rule(e)

    def to_json(self, depth: int = 3) -> list:
        out = []
        for v, e in _edges_in_ball(depth):
            seg = e.interval()
            out.append({"element": list(e.element.entries()), "outward": e.outward,
                        "arc": [str(seg.a), str(seg.b)],
                        "value": self.group.value_to_json(self(e))})
        return out


def current_from_measure(mu: PseudoMeasure) -> Current:
    return Current(lambda e: mu.evaluate(e.interval().a, e.interval().b), mu.group,
                   name=f"current[{mu.name}]")


def measure_from_current(c: Current, validate_depth: int = 0) -> PseudoMeasure:
    rule = lambda seg: c(edge_for_segment(seg))
    mu = PseudoMeasure(PreMeasure(rule, c.group, "from-current"), name=f"measure[{c.name}]")
    if validate_depth:
        rep = current_validate(c, validate_depth)
        if not rep.ok:
            raise ValueError(f"current violates its axioms: {rep.witness}")
    return mu


@dataclass
class CurrentReport:
    ok: bool
    vertices_checked: int
    edges_checked: int
    witness: Optional[Any] = None


def _vertices_in_ball(depth: int):
    """Vertex ids within `depth` edges of the base triangle vertex."""
    base = _triangle_id(IDENTITY)
    seen = {base}
    frontier = [base]
    yield base
    for _ in range(depth):
        nxt = []
        for v in frontier:
            for e in edges_at_vertex(v):
                w = e.midpoint_vertex() if e.outward else e.center_vertex()
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
                    yield w
        frontier = nxt


def _edges_in_ball(depth: int):
    for v in _vertices_in_ball(depth):
        for e in edges_at_vertex(v):
            yield v, e


def current_validate(c: Current, depth: int = 6) -> CurrentReport:
    grp = c.group
    nv = ne = 0
    for v in _vertices_in_ball(depth):
        nv += 1
        edges = edges_at_vertex(v)
        total = grp.total(c(e) for e in edges)
        if not grp.is_zero(total):
            return CurrentReport(False, nv, ne, ("conservation", v, total))
        for e in edges:
            ne += 1
            s = grp.add(c(e), c(e.reverse()))
            if not grp.is_zero(s):
                return CurrentReport(False, nv, ne, ("reversal", e, s))
    return CurrentReport(True, nv, ne)


# ---------------------------------------------------------------------------
# locally constant functions on the boundary


class LocallyConstantFunction:
    """Integer combination of arc indicators, with an exact canonical form.

    The canonical form cuts the circle at infinity, 0, 1, and every term
    endpoint, records the constant value on each elementary arc, and merges
    equal neighbours; two functions are equal iff their canonical forms are.
    """

    def __init__(self, terms: Iterable[Tuple[PrimitiveSegment, int]]):
        self.terms = [(seg, int(c)) for seg, c in terms if c]

    @staticmethod
    def indicator(seg: PrimitiveSegment) -> "LocallyConstantFunction":
        return LocallyConstantFunction([(seg, 1)])

    def __add__(self, other):
        return LocallyConstantFunction(self.terms + other.terms)

    def __sub__(self, other):
        return LocallyConstantFunction(self.terms + [(s, -c) for s, c in other.terms])

    def __neg__(self):
        return LocallyConstantFunction([(s, -c) for s, c in self.terms])

    def scale(self, n: int) -> "LocallyConstantFunction":
        return LocallyConstantFunction([(s, n * c) for s, c in self.terms])

    def compose(self, g: UnimodularMatrix) -> "LocallyConstantFunction":
        """f o g; indicator arcs pull back through g^{-1}."""
        h = g.inverse()
        return LocallyConstantFunction([(s.apply(h), c) for s, c in self.terms])

    def value_at(self, x: ProjectiveRational) -> int:
        """Value at a point not sitting on any term endpoint."""
        return sum(c for s, c in self.terms if arc_contains(s, x, closed=False))

    def canonical(self) -> Tuple[Tuple[ProjectiveRational, ...], Tuple[int, ...]]:
        cuts = {INFINITY, ProjectiveRational(0), ProjectiveRational(1)}
        for s, _ in self.terms:
            cuts.add(s.a)
            cuts.add(s.b)
        pts = sorted(cuts, key=_circle_key)
        values = []
        n = len(pts)
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            sample = arc_interior_sample(a, b)
            values.append(self.value_at(sample))
        # merge equal neighbours (drop the shared cut), keep at least 3 cuts
        changed = True
        while changed and len(pts) > 1:
            changed = False
            for i in range(len(pts)):
                j = (i + 1) % len(pts)
                if values[i] == values[j] and len(pts) > 1:
                    # removing cut j merges arc i with arc j
                    del pts[j], values[j]
                    changed = True
                    break
        if len(values) > 1 and len(set(values)) == 1:
            values = values[:1]
            pts = pts[:1]
        return tuple(pts), tuple(values)

    def is_zero(self) -> bool:
        _, values = self.canonical()
        return all(v == 0 for v in values)

    def is_constant(self) -> Optional[int]:
        _, values = self.canonical()
        return values[0] if len(set(values)) == 1 else None

    def __eq__(self, other):
        return isinstance(other, LocallyConstantFunction) and (self - other).is_zero()

    def primitive_refinement(self) -> List[Tuple[PrimitiveSegment, int]]:
        """The canonical values re-expressed on a disjoint family of
        primitive arcs via mediant splitting from the base partition."""
        pts, values = self.canonical()
        if len(pts) == 1:
            # constant: report on the base partition
            base = [PrimitiveSegment(INFINITY, ProjectiveRational(0)),
                    PrimitiveSegment(ProjectiveRational(0), ProjectiveRational(1)),
                    PrimitiveSegment(ProjectiveRational(1), INFINITY)]
            return [(b, values[0]) for b in base]
        out: List[Tuple[PrimitiveSegment, int]] = []
        n = len(pts)
        arcs = [(pts[i], pts[(i + 1) % n], values[i]) for i in range(n)]
        base = [PrimitiveSegment(INFINITY, ProjectiveRational(0)),
                PrimitiveSegment(ProjectiveRational(0), ProjectiveRational(1)),
                PrimitiveSegment(ProjectiveRational(1), INFINITY)]

        def cover(part: PrimitiveSegment):
            # restrict the function to the part; if constant, emit; else split
            inner_cuts = [p for (p, q, v) in arcs if arc_contains(part, p, closed=False)]
            if not inner_cuts:
                sample = arc_interior_sample(part.a, part.b)
                val = self.value_at(sample)
                if val:
                    out.append((part, val))
                return
            m = arc_split_point(part)
            cover(PrimitiveSegment(part.a, m))
            cover(PrimitiveSegment(m, part.b))

        for b in base:
            cover(b)
        return out


def integrate(f: LocallyConstantFunction, mu: PseudoMeasure):
    """Sum of coefficient times measure of arc; well defined under refinement
    because the measure is finitely additive along arc splits."""
    grp = mu.group
    out = grp.zero()
    for seg, c in f.terms:
        out = grp.add(out, grp.int_mul(c, mu.evaluate(seg.a, seg.b)))
    return out


def integrate_refined(f: LocallyConstantFunction, mu: PseudoMeasure):
    grp = mu.group
    out = grp.zero()
    for seg, c in f.primitive_refinement():
        out = grp.add(out, grp.int_mul(c, mu.evaluate(seg.a, seg.b)))
    return out


def kernel_function_check(f: LocallyConstantFunction) -> Tuple[bool, bool]:
    """(sigma condition, tau condition): f + f o sigma = 0 and
    f + f o tau + f o tau^2 = 0 as exact canonical-form identities."""
    s_ok = (f + f.compose(SIGMA)).is_zero()
    t_ok = (f + f.compose(TAU) + f.compose(TAU * TAU)).is_zero()
    return s_ok, t_ok


def measure_from_kernel_function(f: LocallyConstantFunction, mu: PseudoMeasure,
                                 validate_depth: int = 0) -> PseudoMeasure:
    """For f killed by both averaging conditions and a modular mu, the value
    integral of f is a seed and induces a new modular measure."""
    s_ok, t_ok = kernel_function_check(f)
    if not (s_ok and t_ok):
        raise ValueError(f"function fails the kernel conditions: sigma={s_ok}, tau={t_ok}")
    seed = integrate(f, mu)
    if not check_seed(mu.group, seed):
        raise ValueError("integral of the kernel function is not a seed (is mu modular?)")
    return from_seed(mu.group, seed, validate_depth)


def descend_check(mu: PseudoMeasure, functions: Iterable[LocallyConstantFunction]) -> bool:
    """Equivariance of integration, the content of the descent of the
    integration pairing to coinvariants: for every sampled f,
        integral of (f + f o sigma) equals (1 + sigma) applied to integral f,
    and likewise for the tau-averaging; fails for non-modular measures."""
    grp = mu.group
    for f in functions:
        lhs = integrate(f + f.compose(SIGMA), mu)
        base = integrate(f, mu)
        rhs = grp.add(base, grp.act(SIGMA, base))
        if not grp.eq(lhs, rhs):
            return False
        lhs = integrate(f + f.compose(TAU) + f.compose(TAU * TAU), mu)
        rhs = grp.add(base, grp.add(grp.act(TAU, base), grp.act(TAU * TAU, base)))
        if not grp.eq(lhs, rhs):
            return False
    return True


# ---------------------------------------------------------------------------
# nested arcs toward a boundary target (rational or exact irrational)


def walk_to_target(contains: Callable[[PrimitiveSegment], Optional[bool]], steps: int):
    """Yield the nested arcs toward a target given a strict-membership oracle.

    `contains(arc)` reports whether the target is strictly inside; the walk
    starts from the base partition and splits at the tessellation point.  It
    raises if the target sits on a cut (rational targets need the two-sided
    walkers below).
    """
    base = [PrimitiveSegment(INFINITY, ProjectiveRational(0)),
            PrimitiveSegment(ProjectiveRational(0), ProjectiveRational(1)),
            PrimitiveSegment(ProjectiveRational(1), INFINITY)]
    arc = next((b for b in base if contains(b)), None)
    if arc is None:
        raise ValueError("target on the base cuts")
    for _ in range(steps):
        yield arc
        m = arc_split_point(arc)
        left = PrimitiveSegment(arc.a, m)
        right = PrimitiveSegment(m, arc.b)
        in_left = contains(left)
        in_right = contains(right)
        if in_left and in_right:
            raise AssertionError("strict membership cannot hold on both children")
        if not in_left and not in_right:
            raise ValueError("target hit a tessellation cut (rational target)")
        arc = left if in_left else right


def rational_approach_arcs(theta, steps: int) -> Tuple[list, list]:
    """The two infinite nested-arc paths converging to a rational boundary
    point, one per side; each list holds `steps` arcs with theta on their
    closure.  (Irrational targets have a unique path; rational ones split
    once the point becomes a tessellation cut.)"""
    t = as_point(theta)
    base = [PrimitiveSegment(INFINITY, ProjectiveRational(0)),
            PrimitiveSegment(ProjectiveRational(0), ProjectiveRational(1)),
            PrimitiveSegment(ProjectiveRational(1), INFINITY)]
    ending_at = next((b for b in base if b.b == t), None)
    starting_at = next((b for b in base if b.a == t), None)
    if ending_at is None and starting_at is None:
        arc = next(b for b in base if arc_contains(b, t, closed=False))
        while True:
            m = arc_split_point(arc)
            if m == t:
                ending_at = PrimitiveSegment(arc.a, t)
                starting_at = PrimitiveSegment(t, arc.b)
                break
            left = PrimitiveSegment(arc.a, m)
            arc = left if arc_contains(left, t, closed=False) else PrimitiveSegment(m, arc.b)

    def fan(start: PrimitiveSegment, theta_outgoing: bool, k: int):
        arcs = []
        cur = start
        for _ in range(k):
            arcs.append(cur)
            m = arc_split_point(cur)
            cur = PrimitiveSegment(m, t) if theta_outgoing else PrimitiveSegment(t, m)
        return arcs

    return fan(ending_at, True, steps), fan(starting_at, False, steps)


# ---------------------------------------------------------------------------
# debug artifact: tessellation drawing with current labels


def tessellation_svg(c: Current, depth: int = 3, width: int = 900, height: int = 480) -> str:
    """A small SVG of the Farey tessellation arcs in the upper half plane,
    labelled with the current values on the outward edges."""
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']
    xmin, xmax = Fraction(-2), Fraction(3)
    scale = Fraction(width) / (xmax - xmin)

    def xpix(x: Fraction) -> float:
        return float((x - xmin) * scale)

    seen = set()
    for v, e in _edges_in_ball(depth):
        if not e.outward:
            continue
        seg = e.interval()
        if seg in seen:
            continue
        seen.add(seg)
        a, b = seg.a, seg.b
        label = str(c(e)) if c is not None else ""
        if a.is_infinity or b.is_infinity:
            x = b if a.is_infinity else a
            fx = x.as_fraction()
            if not (xmin <= fx <= xmax):
                continue
            lines.append(f'<line x1="{xpix(fx):.1f}" y1="{height - 20}" x2="{xpix(fx):.1f}" y2="20" '
                         'stroke="steelblue" stroke-width="1"/>')
        else:
            fa, fb = a.as_fraction(), b.as_fraction()
            lo, hi = min(fa, fb), max(fa, fb)
            if hi < xmin or lo > xmax:
                continue
            cx = xpix((lo + hi) / 2)
            r = float((hi - lo) * scale / 2)
            lines.append(f'<path d="M {xpix(lo):.1f} {height - 20} A {r:.1f} {r:.1f} 0 0 1 '
                         f'{xpix(hi):.1f} {height - 20}" fill="none" stroke="steelblue" stroke-width="1"/>')
    lines.append(f'<line x1="0" y1="{height - 20}" x2="{width}" y2="{height - 20}" stroke="black"/>')
    lines.append("</svg>")
    return "\n".join(lines)
