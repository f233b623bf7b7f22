"""Primitive (Farey) segments, primitive chains, and loop reduction.

A primitive segment is an ordered pair of boundary points whose reduced
coordinates satisfy |ad - bc| = 1; the set of such ordered pairs is a
principal homogeneous space over PSL(2,Z).  Every pair of boundary points
is linked by a chain of primitive segments, and every primitive loop can be
emptied by four kinds of elementary moves, which is what makes evaluation
of a pre-measure along a chain independent of the chain.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .boundary import (
    INFINITY,
    IDENTITY,
    ProjectiveRational,
    RationalLike,
    UnimodularMatrix,
    as_point,
    convergents,
    cross,
)


@dataclass(frozen=True)
class PrimitiveSegment:
    """Oriented primitive segment: ingoing end `a`, outgoing end `b`."""

    a: ProjectiveRational
    b: ProjectiveRational

    def __post_init__(self):
        if not is_primitive(self.a, self.b):
            raise ValueError(f"({self.a}, {self.b}) is not a primitive segment")

    def reverse(self) -> "PrimitiveSegment":
        return PrimitiveSegment(self.b, self.a)

    def apply(self, g) -> "PrimitiveSegment":
        return PrimitiveSegment(g(self.a), g(self.b))

    def __str__(self):
        return f"({self.a},{self.b})"


def segment(a: RationalLike, b: RationalLike) -> PrimitiveSegment:
    return PrimitiveSegment(as_point(a), as_point(b))


def is_primitive(a: RationalLike, b: RationalLike) -> bool:
    a, b = as_point(a), as_point(b)
    return a != b and abs(cross(a, b)) == 1


def segment_matrix(seg: PrimitiveSegment) -> UnimodularMatrix:
    """The unique PSL(2,Z) element g with g(inf) = a and g(0) = b."""
    p1, q1 = seg.a.num, seg.a.den
    p2, q2 = seg.b.num, seg.b.den
    if p1 * q2 - p2 * q1 == 1:
        return UnimodularMatrix(p1, p2, q1, q2)
    return UnimodularMatrix(p1, -p2, q1, -q2)


class PrimitiveChain:
    """Ordered list of primitive segments whose ends are linked in sequence."""

    __slots__ = ("segments",)

    def __init__(self, segments: Iterable[PrimitiveSegment]):
        segs = tuple(segments)
        for s, t in zip(segs, segs[1:]):
            if s.b != t.a:
                raise ValueError(f"chain broken between {s} and {t}")
        object.__setattr__(self, "segments", segs)

    def __setattr__(self, *a):
        raise AttributeError("PrimitiveChain is immutable")

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __getitem__(self, i):
        return self.segments[i]

    def __eq__(self, other):
        return isinstance(other, PrimitiveChain) and self.segments == other.segments

    @property
    def start(self) -> Optional[ProjectiveRational]:
        return self.segments[0].a if self.segments else None

    @property
    def end(self) -> Optional[ProjectiveRational]:
        return self.segments[-1].b if self.segments else None

    def is_loop(self) -> bool:
        return not self.segments or self.start == self.end

    def vertices(self) -> list:
        if not self.segments:
            return []
        return [s.a for s in self.segments] + [self.segments[-1].b]

    def reverse(self) -> "PrimitiveChain":
        return PrimitiveChain([s.reverse() for s in reversed(self.segments)])

    def apply(self, g) -> "PrimitiveChain":
        return PrimitiveChain([s.apply(g) for s in self.segments])

    def __repr__(self):
        return "Chain[" + ", ".join(str(s) for s in self.segments) + "]"

    def to_json(self) -> list:
        return [[str(s.a), str(s.b)] for s in self.segments]

    @staticmethod
    def from_json(data) -> "PrimitiveChain":
        return PrimitiveChain(
            [segment(ProjectiveRational.parse(a), ProjectiveRational.parse(b)) for a, b in data]
        )


def convergent_chain(x: RationalLike) -> List[PrimitiveSegment]:
    """The chain from inf to a finite rational through its convergents."""
    conv = convergents(as_point(x).as_fraction())
    return [PrimitiveSegment(u, v) for u, v in zip(conv, conv[1:])]


def primitive_chain(a: RationalLike, b: RationalLike) -> PrimitiveChain:
    """Canonical chain from a to b: reversed convergent chain of a, then the
    convergent chain of b; empty when a == b."""
    a, b = as_point(a), as_point(b)
    if a == b:
        return PrimitiveChain([])
    left = [] if a.is_infinity else [s.reverse() for s in reversed(convergent_chain(a))]
    right = [] if b.is_infinity else convergent_chain(b)
    return PrimitiveChain(left + right)


# ---------------------------------------------------------------------------
# elementary moves

CANCEL_PAIR = "cancel-pair"
INSERT_PAIR = "insert-pair"
CANCEL_TRIANGLE = "cancel-triangle"
INSERT_TRIANGLE = "insert-triangle"


@dataclass(frozen=True)
class ElementaryMove:
    """One rewriting step on a chain.

    `position` indexes segments; cancels delete the block starting there,
    inserts splice their `data` segments in starting there.  Both preserve
    the chain's endpoints.
    """

    kind: str
    position: int
    data: Tuple[PrimitiveSegment, ...]

    def mapped(self, g) -> "ElementaryMove":
        return ElementaryMove(self.kind, self.position, tuple(s.apply(g) for s in self.data))

    def shifted(self, offset: int) -> "ElementaryMove":
        return ElementaryMove(self.kind, self.position + offset, self.data)


def apply_move(segments: Sequence[PrimitiveSegment], move: ElementaryMove) -> List[PrimitiveSegment]:
    segs = list(segments)
    i = move.position
    if move.kind == CANCEL_PAIR:
        if segs[i : i + 2] != list(move.data) or segs[i + 1] != segs[i].reverse():
            raise ValueError(f"cancel-pair does not apply at {i}")
        del segs[i : i + 2]
    elif move.kind == CANCEL_TRIANGLE:
        block = segs[i : i + 3]
        if block != list(move.data) or block[0].a != block[2].b:
            raise ValueError(f"cancel-triangle does not apply at {i}")
        del segs[i : i + 3]
    elif move.kind in (INSERT_PAIR, INSERT_TRIANGLE):
        want = 2 if move.kind == INSERT_PAIR else 3
        if len(move.data) != want:
            raise ValueError("bad insertion data")
        if move.data[-1].b != move.data[0].a:
            raise ValueError("inserted block must be a loop")
        anchor = segs[i].a if i < len(segs) else (segs[-1].b if segs else move.data[0].a)
        if move.data[0].a != anchor:
            raise ValueError("insertion must be anchored at an existing vertex")
        segs[i:i] = list(move.data)
    else:
        raise ValueError(f"unknown move kind {move.kind!r}")
    # re-validate linkage around the edit
    for s, t in zip(segs, segs[1:]):
        if s.b != t.a:
            raise ValueError("move broke the chain")
    return segs


def _find_cancel_pair(segs) -> Optional[int]:
    for i in range(len(segs) - 1):
        if segs[i + 1] == segs[i].reverse():
            return i
    return None


def _find_cancel_triangle(segs) -> Optional[int]:
    for i in range(len(segs) - 2):
        if segs[i].a == segs[i + 2].b:
            return i
    return None


def _find_subloop(segs) -> Optional[Tuple[int, int]]:
    """Smallest proper subloop (i, j): vertex i equals vertex j, 2 <= j-i < n."""
    n = len(segs)
    verts = [s.a for s in segs] + [segs[-1].b]
    best = None
    for span in range(2, n):
        for i in range(0, n - span + 1):
            j = i + span
            if (i, j) == (0, n):
                continue
            if verts[i] == verts[j]:
                return (i, j)
    return best


def _splice_step(segs: List[PrimitiveSegment]):
    """One splice at the basepoint for a subloop-free loop at infinity.

    `segs` must start with (inf, 0), end with (b, inf) for an integer b != 0,
    and have no repeated vertices besides the basepoint.  Returns
    (moves, remaining_segments); moves are relative to `segs`.
    """
    n = len(segs)
    b_pt = segs[-1].a
    if b_pt.den != 1:
        raise AssertionError("loop at infinity must re-enter through an integer")
    b = b_pt.num
    s = 1 if b > 0 else -1
    ap = ProjectiveRational(s)
    zero = ProjectiveRational(0)
    inf = INFINITY
    moves: List[ElementaryMove] = []

    if b == s:  # |a - b| = 1 with a = 0
        ins = ElementaryMove(INSERT_PAIR, 1, (PrimitiveSegment(zero, b_pt), PrimitiveSegment(b_pt, zero)))
        moves.append(ins)
        work = apply_move(segs, ins)
        sub = work[2 : n + 1]  # (b,0), old segs[1..n-2]: loop at b of length n-1
        submoves = _reduce(list(sub))
        moves.extend(m.shifted(2) for m in submoves)
        rest = work[:2] + work[n + 1 :]  # (inf,0), (0,b), (b,inf)
        tri = ElementaryMove(CANCEL_TRIANGLE, 0, tuple(rest))
        moves.append(tri)
        return moves, []

    if segs[1].b == ap:  # the step to a' is already there
        ins = ElementaryMove(INSERT_PAIR, 2, (PrimitiveSegment(ap, inf), PrimitiveSegment(inf, ap)))
        moves.append(ins)
        work = apply_move(segs, ins)
        tri = ElementaryMove(CANCEL_TRIANGLE, 0, tuple(work[:3]))
        moves.append(tri)
        rest = apply_move(work, tri)
        return moves, rest

    # a' = +-1 must occur as an interior vertex (no finite primitive segment
    # strictly contains an integer); splice a detour 0 -> a' -> 0 and excise
    # the subloop based at a'.
    verts = [seg.a for seg in segs]
    k = next((i for i in range(3, n - 1) if verts[i] == ap), None)
    if k is None:
        raise AssertionError("adjacent integer not found on a subloop-free loop")
    ins = ElementaryMove(INSERT_PAIR, 1, (PrimitiveSegment(zero, ap), PrimitiveSegment(ap, zero)))
    moves.append(ins)
    work = apply_move(segs, ins)
    sub = work[2 : k + 2]  # (a',0), old segs[1..k-1]: loop at a' of length k
    submoves = _reduce(list(sub))
    moves.extend(m.shifted(2) for m in submoves)
    rest = work[:2] + work[k + 2 :]
    return moves, rest


def _reduce(segs: List[PrimitiveSegment]) -> List[ElementaryMove]:
    """Empty a primitive loop; returns moves relative to the given list."""
    moves: List[ElementaryMove] = []
    while segs:
        i = _find_cancel_pair(segs)
        if i is not None:
            mv = ElementaryMove(CANCEL_PAIR, i, (segs[i], segs[i + 1]))
            moves.append(mv)
            del segs[i : i + 2]
            continue
        i = _find_cancel_triangle(segs)
        if i is not None:
            mv = ElementaryMove(CANCEL_TRIANGLE, i, tuple(segs[i : i + 3]))
            moves.append(mv)
            del segs[i : i + 3]
            continue
        sub = _find_subloop(segs)
        if sub is not None:
            i, j = sub
            inner = segs[i:j]
            submoves = _reduce(inner)
            moves.extend(m.shifted(i) for m in submoves)
            del segs[i:j]
            continue
        # subloop-free with length >= 4: translate the basepoint to infinity
        g = segment_matrix(segs[0])
        h = g.inverse()
        conj = [seg.apply(h) for seg in segs]
        batch, rest = _splice_step(conj)
        moves.extend(m.mapped(g) for m in batch)
        segs[:] = [seg.apply(g) for seg in rest]
    return moves


def reduce_loop(loop: PrimitiveChain) -> List[ElementaryMove]:
    """Moves (in order) that transform the given primitive loop into the
    empty loop; every intermediate chain is again a loop."""
    if not isinstance(loop, PrimitiveChain):
        loop = PrimitiveChain(loop)
    if not loop.is_loop():
        raise ValueError("reduce_loop expects a loop (matching endpoints)")
    return _reduce(list(loop.segments))


# ---------------------------------------------------------------------------
# randomized chains (used by chain-independence property tests)

def primitive_neighbor(v: ProjectiveRational, rng: random.Random) -> ProjectiveRational:
    """A random boundary point forming a primitive segment with v."""
    p, q = v.num, v.den
    # solve p*y - x*q = eps via the extended Euclid, then shift along the line
    eps = rng.choice((1, -1))
    x0, y0 = _solve_unimodular(p, q, eps)
    t = rng.randint(-3, 3)
    return ProjectiveRational(x0 + t * p, y0 + t * q)


def _solve_unimodular(p: int, q: int, eps: int) -> Tuple[int, int]:
    # one solution of p*y - x*q = eps with gcd(p, q) = 1
    g, u, w = _xgcd(p, q)
    assert g == 1
    # p*u + q*w = 1  =>  p*(eps*u) - (-eps*w)*q = eps
    return (-eps * w, eps * u)


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def triangle_through(seg: PrimitiveSegment, which: int) -> ProjectiveRational:
    """Third vertex of one of the two Farey triangles on the edge; which = +-1."""
    g = segment_matrix(seg)
    return g(ProjectiveRational(which))


def randomize_chain(chain: PrimitiveChain, rng: random.Random, steps: int = 6) -> PrimitiveChain:
    """Apply random insert moves; the result is a valid chain with the same
    endpoints and the same pre-measure sum."""
    segs = list(chain.segments)
    for _ in range(steps):
        pos = rng.randint(0, len(segs))
        if pos < len(segs):
            anchor = segs[pos].a
        elif segs:
            anchor = segs[-1].b
        else:
            break
        if rng.random() < 0.5:
            delta = primitive_neighbor(anchor, rng)
            mv = ElementaryMove(
                INSERT_PAIR, pos, (PrimitiveSegment(anchor, delta), PrimitiveSegment(delta, anchor))
            )
        else:
            delta = primitive_neighbor(anchor, rng)
            third = triangle_through(PrimitiveSegment(anchor, delta), rng.choice((1, -1)))
            mv = ElementaryMove(
                INSERT_TRIANGLE,
                pos,
                (
                    PrimitiveSegment(anchor, delta),
                    PrimitiveSegment(delta, third),
                    PrimitiveSegment(third, anchor),
                ),
            )
        segs = apply_move(segs, mv)
    return PrimitiveChain(segs)


def random_loop(rng: random.Random, length_bound: int = 12) -> PrimitiveChain:
    """A random primitive loop built from random insertions at a random basepoint."""
    base = random_boundary_point(rng)
    chain = PrimitiveChain([])
    # force a first pair so the loop is non-empty, then let it grow
    delta = primitive_neighbor(base, rng)
    segs = [PrimitiveSegment(base, delta), PrimitiveSegment(delta, base)]
    chain = PrimitiveChain(segs)
    while True:
        grown = randomize_chain(chain, rng, steps=rng.randint(0, 3))
        if len(grown) <= length_bound:
            chain = grown
        if len(chain) >= length_bound or rng.random() < 0.4:
            break
    return chain


def random_boundary_point(rng: random.Random, max_den: int = 12) -> ProjectiveRational:
    if rng.random() < 0.08:
        return INFINITY
    q = rng.randint(1, max_den)
    p = rng.randint(-3 * max_den, 3 * max_den)
    return ProjectiveRational(p, q)


# ---------------------------------------------------------------------------
# enumeration of short segments and triangles (validation back-ends)

def farey_triangles(max_den: int, lo: int = -2, hi: int = 3):
    """Yield primitive 3-loops with vertices of denominator <= max_den.

    Covers the triangles {inf, n, n+1} and, inside every unit interval
    [n, n+1] for lo <= n < hi, all mediant triangles with denominator
    bounded by max_den.
    """
    for n in range(lo, hi):
        a = ProjectiveRational(n)
        b = ProjectiveRational(n + 1)
        yield (INFINITY, a, b)
        stack = [(a, b)]
        while stack:
            u, v = stack.pop()
            m = ProjectiveRational(u.num + v.num, u.den + v.den)
            if m.den > max_den:
                continue
            yield (u, m, v)
            stack.append((u, m))
            stack.append((m, v))


def loop_of_triangle(tri) -> PrimitiveChain:
    x, y, z = tri
    return PrimitiveChain([PrimitiveSegment(x, y), PrimitiveSegment(y, z), PrimitiveSegment(z, x)])


def primitive_segments(max_den: int, lo: int = -2, hi: int = 3):
    """Finite primitive segments with denominators <= max_den inside [lo, hi],
    plus the infinite segments (n, inf) and (inf, n) in the window.  Positively
    oriented; callers reverse as needed."""
    seen = set()
    for n in range(lo, hi):
        yield PrimitiveSegment(ProjectiveRational(n), INFINITY)
        yield PrimitiveSegment(INFINITY, ProjectiveRational(n))
    yield PrimitiveSegment(ProjectiveRational(hi), INFINITY)
    yield PrimitiveSegment(INFINITY, ProjectiveRational(hi))
    for tri in farey_triangles(max_den, lo, hi):
        x, y, z = tri
        for u, v in ((x, y), (y, z), (z, x)):
            if u.is_infinity or v.is_infinity:
                continue
            key = (u, v)
            if key not in seen:
                seen.add(key)
                yield PrimitiveSegment(u, v)
