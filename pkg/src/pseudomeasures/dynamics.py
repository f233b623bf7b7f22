"""The signed Gauss shift, its coset-tracking extension, shift-space
admissibility, Lyapunov exponents, and limiting boundary measures.

Quadratic irrationals enter exactly through eventually periodic continued
fractions; their convergent segments give eventually periodic value
sequences whenever the group action on values factors through finite coset
data, and the limit of the normalized partial sums has an exact closed form
(one period's average over the Lyapunov exponent).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .boundary import INFINITY, SIGMA, T_SHIFT, ProjectiveRational, UnimodularMatrix
from .chains import PrimitiveSegment
from .coeffmodules import CosetFunctionModule, CosetSpace
from .measures import PseudoMeasure
from .tree import Current, arc_split_point, edge_for_segment

S_MAT = SIGMA
T_MAT = T_SHIFT


# ---------------------------------------------------------------------------
# the shift itself


def gauss_shift(x: Fraction) -> Optional[Fraction]:
    """x -> -sign(x) (1/|x| - floor(1/|x|)) on [-1, 1]; None once the orbit
    dies at 0 (rational inputs always die)."""
    x = Fraction(x)
    if abs(x) > 1:
        raise ValueError("the shift lives on [-1, 1]")
    if x == 0:
        return None
    y = 1 / abs(x)
    frac = y - (y.numerator // y.denominator)
    return -frac if x > 0 else frac


def step_element(k: int) -> UnimodularMatrix:
    """S T^k = (0, -1; 1, k), the coset step of one shift iteration."""
    return UnimodularMatrix(0, -1, 1, k)


def generalized_shift(x: Fraction, s: int, space: CosetSpace) -> Optional[Tuple[Fraction, int]]:
    """One step of the coset-tracking shift: (x, s) -> (shift x, [g S T^k])
    with k = sign(x) * first digit of |x|."""
    x = Fraction(x)
    if x == 0:
        return None
    y = 1 / abs(x)
    n1 = y.numerator // y.denominator
    k = n1 if x > 0 else -n1
    nxt = gauss_shift(x)
    s2 = space.right_mul(s, step_element(k))
    return (nxt if nxt is not None else Fraction(0), s2)


def shift_orbit(x: Fraction, space: CosetSpace, s: int = 0) -> Iterator[Tuple[Fraction, int]]:
    state = (Fraction(x), s)
    while True:
        yield state
        if state[0] == 0:
            return
        nxt = generalized_shift(state[0], state[1], space)
        if nxt is None:
            return
        state = nxt


def signed_digits(x: Fraction) -> List[int]:
    """The signed digits k_i = sign(x_i) * n_1(|x_i|) along the orbit of x."""
    out = []
    x = Fraction(x)
    while x != 0:
        y = 1 / abs(x)
        n1 = y.numerator // y.denominator
        out.append(n1 if x > 0 else -n1)
        x = gauss_shift(x)
    return out


def iterate_matrix(x: Fraction, n: int) -> UnimodularMatrix:
    """The product of the step elements S T^{k_i} over the first n steps;
    this is the PSL element by which the n-th shift iterate acts on cosets."""
    ks = signed_digits(x)
    if n > len(ks):
        raise ValueError("orbit is shorter than n")
    out = None
    for k in ks[:n]:
        step = step_element(k)
        out = step if out is None else out * step
    return out if out is not None else UnimodularMatrix(1, 0, 0, 1)


@dataclass(frozen=True)
class ShiftLetter:
    """Alphabet letter of the shift space: nonzero signed digit + coset."""

    x: int
    s: int

    def __post_init__(self):
        if self.x == 0:
            raise ValueError("digit must be nonzero")


def admissible(a: ShiftLetter, b: ShiftLetter, space: CosetSpace) -> int:
    """1 iff the signs alternate and the coset moves by S T^{x_a}."""
    if a.x * b.x >= 0:
        return 0
    return 1 if b.s == space.right_mul(a.s, step_element(a.x)) else 0


def admissible_variant(a: ShiftLetter, b: ShiftLetter, space: CosetSpace) -> int:
    """The variant form: signs alternate and s_a = s_b . S T^{x_b}; agrees
    with `admissible` on the one-point coset space."""
    if a.x * b.x >= 0:
        return 0
    return 1 if a.s == space.right_mul(b.s, step_element(b.x)) else 0


def admissibility_product(xs: Sequence[ShiftLetter], ys: Sequence[ShiftLetter],
                          b: ShiftLetter, space: CosetSpace) -> int:
    """prod over x in xs of A(x,b) times prod over y in ys of (1 - A(y,b))."""
    out = 1
    for x in xs:
        out *= admissible(x, b, space)
        if not out:
            return 0
    for y in ys:
        out *= 1 - admissible(y, b, space)
        if not out:
            return 0
    return out


# ---------------------------------------------------------------------------
# periodic continued fractions and exact quadratic irrationals


@dataclass(frozen=True)
class PeriodicCF:
    """Eventually periodic continued fraction [k0; pre..., (period...)].

    The head (k0 and the preperiod) may hold any integers produced by the
    expansion being represented; periodic partials must be >= 1.  Canonical
    form: the period is primitive (not a power) and the preperiod never ends
    with the last period entry, so equal irrationals compare equal.
    """

    k0: int
    preperiod: Tuple[int, ...]
    period: Tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be non-empty")
        if any(k < 1 for k in self.period):
            raise ValueError("periodic partials must be >= 1")
        if any(k < 1 for k in self.preperiod):
            raise ValueError("preperiod partials must be >= 1")

    @staticmethod
    def make(k0: int, preperiod: Sequence[int], period: Sequence[int]) -> "PeriodicCF":
        period = list(period)
        pre = list(preperiod)
        # primitive period
        p = len(period)
        for d in range(1, p):
            if p % d == 0 and period == period[d:] + period[:d]:
                period = period[:d]
                break
        # absorb preperiod tails equal to the period's last entry
        while pre and pre[-1] == period[-1]:
            pre.pop()
            period = [period[-1]] + period[:-1]
        return PeriodicCF(k0, tuple(pre), tuple(period))

    def digits(self, n: int) -> List[int]:
        """First n partial quotients after k0."""
        out = list(self.preperiod)
        i = 0
        while len(out) < n:
            out.append(self.period[i % len(self.period)])
            i += 1
        return out[:n]

    def convergents(self, n: int) -> List[ProjectiveRational]:
        """1/0, k0/1, and the next n convergents."""
        ps = [1, self.k0]
        qs = [0, 1]
        for k in self.digits(n):
            ps.append(k * ps[-1] + ps[-2])
            qs.append(k * qs[-1] + qs[-2])
        return [ProjectiveRational(p, q) for p, q in zip(ps, qs)]

    def convergent_segments(self, n: int) -> List[PrimitiveSegment]:
        """The first n segments (p_{k-1}/q_{k-1}, p_k/q_k) of the chain from
        infinity toward the irrational."""
        conv = self.convergents(n)
        return [PrimitiveSegment(u, v) for u, v in zip(conv, conv[1:])]

    def period_matrix(self) -> Tuple[int, int, int, int]:
        """Product of (k, 1; 1, 0) over one period (entries, not PSL-reduced)."""
        a, b, c, d = 1, 0, 0, 1
        for k in self.period:
            a, b, c, d = a * k + b, a, c * k + d, c
        return (a, b, c, d)

    def value(self) -> "QuadraticIrrational":
        a, b, c, d = self.period_matrix()
        # fixed point of z -> (a z + b) / (c z + d), the attracting root
        # c > 0 always (period entries >= 1)
        disc = (a - d) * (a - d) + 4 * b * c
        tail = QuadraticIrrational(a - d, 1, disc, 2 * c)
        # fold in the preperiod and k0
        m = [[1, 0], [0, 1]]
        for k in [self.k0] + list(self.preperiod):
            m = [[m[0][0] * k + m[0][1], m[0][0]], [m[1][0] * k + m[1][1], m[1][0]]]
        return tail.moebius(m[0][0], m[0][1], m[1][0], m[1][1])

    def __str__(self):
        head = ",".join(str(k) for k in self.preperiod)
        per = ",".join(str(k) for k in self.period)
        if head:
            return f"[{self.k0};{head},({per})]"
        return f"[{self.k0};({per})]"

    @staticmethod
    def parse(text: str) -> "PeriodicCF":
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise ValueError(f"bad periodic continued fraction literal: {text!r}")
        head, _, tail = text[1:-1].partition(";")
        if "(" not in tail:
            raise ValueError("a period in parentheses is required")
        pre_text, _, rest = tail.partition("(")
        per_text = rest.rstrip(")")
        pre = tuple(int(t) for t in pre_text.strip().rstrip(",").split(",") if t.strip())
        per = tuple(int(t) for t in per_text.split(",") if t.strip())
        return PeriodicCF.make(int(head), pre, per)


def _is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


class QuadraticIrrational:
    """(p + q sqrt(D)) / r with integer p, q != 0, r > 0 and D a positive
    non-square; supports exact comparison with rationals and Moebius maps."""

    __slots__ = ("p", "q", "d", "r")

    def __init__(self, p: int, q: int, d: int, r: int):
        if q == 0 or d <= 0 or _is_square(d):
            raise ValueError("not an irrational quadratic")
        # pull square factors of d into q
        f = 1
        k = 2
        dd = d
        while k * k <= dd:
            while dd % (k * k) == 0:
                dd //= k * k
                f *= k
            k += 1
        q *= f
        d = dd
        if r < 0:
            p, q, r = -p, -q, -r
        g = gcd(gcd(abs(p), abs(q)), r)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "r", r // g)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __float__(self):
        return (self.p + self.q * math.sqrt(self.d)) / self.r

    def __eq__(self, other):
        if isinstance(other, QuadraticIrrational):
            return (self.p, self.q, self.d, self.r) == (other.p, other.q, other.d, other.r)
        return False  # never equal to a rational

    def __hash__(self):
        return hash((self.p, self.q, self.d, self.r))

    def compare_fraction(self, x: Fraction) -> int:
        """Sign of self - x, exactly."""
        # (p - x r) + q sqrt(D) vs 0
        x = Fraction(x)
        a = Fraction(self.p) - x * self.r  # rational part * r
        b = self.q
        # sign of a + b sqrt(D)
        if a >= 0 and b > 0:
            return 1
        if a <= 0 and b < 0:
            return -1
        # opposite signs: compare a^2 vs b^2 D
        lhs = a * a
        rhs = Fraction(b * b * self.d)
        if a > 0:  # b < 0
            return 1 if lhs > rhs else -1
        return 1 if lhs < rhs else -1  # a < 0, b > 0

    def __lt__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.compare_fraction(Fraction(other)) < 0
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.compare_fraction(Fraction(other)) > 0
        return NotImplemented

    def moebius(self, a: int, b: int, c: int, d: int) -> "QuadraticIrrational":
        """(a z + b) / (c z + d) for integer entries, exactly."""
        # numerator: (a p + b r) + a q sqrt(D); denominator: (c p + d r) + c q sqrt(D)
        np_, nq = a * self.p + b * self.r, a * self.q
        dp, dq = c * self.p + d * self.r, c * self.q
        # multiply by the conjugate of the denominator
        den = dp * dp - dq * dq * self.d
        if den == 0:
            raise ZeroDivisionError("image is infinite")
        rp = np_ * dp - nq * dq * self.d
        rq = nq * dp - np_ * dq
        return QuadraticIrrational(rp, rq, self.d, den)

    def in_arc(self, seg: PrimitiveSegment) -> bool:
        """Strict membership in the boundary arc from seg.a to seg.b."""
        a, b = seg.a, seg.b
        if a.is_infinity:
            return self.compare_fraction(b.as_fraction()) < 0
        if b.is_infinity:
            return self.compare_fraction(a.as_fraction()) > 0
        fa, fb = a.as_fraction(), b.as_fraction()
        if fa < fb:
            return self.compare_fraction(fa) > 0 and self.compare_fraction(fb) < 0
        return self.compare_fraction(fa) > 0 or self.compare_fraction(fb) < 0

    def __repr__(self):
        return f"({self.p}+{self.q}*sqrt({self.d}))/{self.r}"


# ---------------------------------------------------------------------------
# Lyapunov exponents


def log_big(n: int) -> float:
    """log of a (possibly huge) positive integer without overflow."""
    if n <= 0:
        raise ValueError("need a positive integer")
    L = n.bit_length()
    if L <= 53:
        return math.log(n)
    hi = n >> (L - 53)
    return math.log(hi) + (L - 53) * math.log(2)


@dataclass
class LyapunovValue:
    """lambda(theta) = (2/p) log rho with rho the leading eigenvalue of the
    period matrix; rho = (trace + sqrt(trace^2 - 4 det)) / 2 exactly."""

    period_length: int
    trace: int
    det: int
    description: str

    @property
    def rho_surd(self) -> Tuple[int, int, int]:
        """(t, disc, 2): rho = (t + sqrt(disc)) / 2."""
        return (abs(self.trace), self.trace * self.trace - 4 * self.det, 2)

    def value(self) -> float:
        t, disc, two = self.rho_surd
        rho = (t + math.sqrt(disc)) / 2
        return 2.0 * math.log(rho) / self.period_length

    def __eq__(self, other):
        return (isinstance(other, LyapunovValue)
                and (self.period_length, abs(self.trace), self.det)
                == (other.period_length, abs(other.trace), other.det))


def lyapunov_exact(theta: PeriodicCF) -> LyapunovValue:
    a, b, c, d = theta.period_matrix()
    tr = a + d
    det = a * d - b * c
    p = len(theta.period)
    return LyapunovValue(p, tr, det,
                         f"(2/{p})*log(({abs(tr)}+sqrt({tr * tr - 4 * det}))/2)")


def lyapunov_estimate(theta: PeriodicCF, n: int) -> float:
    """2 log q_n / n with the exact big-integer denominator q_n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    q_prev, q = 0, 1
    for k in theta.digits(n):
        q_prev, q = q, k * q + q_prev
    return 2.0 * log_big(q) / n


# ---------------------------------------------------------------------------
# limiting measures


@dataclass
class PeriodicSummands:
    """Eventually periodic value sequence v_k with exact period data."""

    preperiod: List[Any]
    cycle: List[Any]

    def value(self, k: int):
        if k < len(self.preperiod):
            return self.preperiod[k]
        return self.cycle[(k - len(self.preperiod)) % len(self.cycle)]

    def partial_sum(self, group, n: int):
        """Sum of v_0 .. v_{n-1} using the cycle structure."""
        total = group.zero()
        head = min(n, len(self.preperiod))
        for k in range(head):
            total = group.add(total, self.preperiod[k])
        rest = n - head
        if rest > 0:
            p = len(self.cycle)
            cyc_total = group.total(self.cycle)
            total = group.add(total, group.int_mul(rest // p, cyc_total))
            for k in range(rest % p):
                total = group.add(total, self.cycle[k])
        return total


class NonConvergent(RuntimeError):
    """Raised when the summand sequence shows no eventual period, which is
    the behaviour on the exceptional set (or a value group whose action does
    not factor through finite data)."""


def detect_period(values: Sequence[Any], eq: Callable[[Any, Any], bool],
                  min_repeats: int = 3) -> Optional[Tuple[int, int]]:
    """(preperiod, period): values[k + p] = values[k] for every k >= start
    within the window, with at least min_repeats full copies confirmed."""
    n = len(values)
    for start in range(0, max(1, n // 2)):
        for p in range(1, (n - start) // min_repeats + 1):
            if all(eq(values[k], values[k + p]) for k in range(start, n - p)):
                return (start, p)
    return None


def summand_sequence(mu: PseudoMeasure, theta: PeriodicCF, count: int) -> List[Any]:
    """v_k = mu of the k-th convergent segment toward theta (k = 0, 1, ...)."""
    segs = theta.convergent_segments(count)
    return [mu.evaluate(s.a, s.b) for s in segs]


def periodic_summands(mu: PseudoMeasure, theta: PeriodicCF,
                      search_window: Optional[int] = None) -> PeriodicSummands:
    grp = mu.group
    p = len(theta.period)
    window = search_window or max(40, 8 * p + 4 * len(theta.preperiod) + 24)
    vals = summand_sequence(mu, theta, window)
    found = detect_period(vals, grp.eq)
    if found is None:
        raise NonConvergent("no eventual period in the summand sequence "
                            "(action does not factor through finite coset data?)")
    start, per = found
    return PeriodicSummands(vals[:start], vals[start:start + per])


@dataclass
class LimitingReport:
    """Exact closed form of the limiting value at (inf, theta):
    mean of one period of summands divided by the Lyapunov exponent."""

    theta: PeriodicCF
    lyapunov: LyapunovValue
    period_mean: Any            # exact value-group element (1/P of cycle sum)
    group: Any

    def numeric(self) -> List[float]:
        lam = self.lyapunov.value()
        mean = self.period_mean if hasattr(self.period_mean, "__iter__") else (self.period_mean,)
        return [float(x) / lam for x in mean]

    def is_zero(self) -> bool:
        return self.group.is_zero(self.period_mean)

    def eq(self, other: "LimitingReport") -> bool:
        return (self.lyapunov == other.lyapunov
                and self.group.eq(self.period_mean, other.period_mean))


def limiting_measure(mu: PseudoMeasure, theta: PeriodicCF) -> LimitingReport:
    """Exact Cesaro limit of the normalized sums over convergent segments."""
    summands = periodic_summands(mu, theta)
    grp = mu.group
    cyc = grp.total(summands.cycle)
    mean = grp.scalar_mul(Fraction(1, len(summands.cycle)), cyc)
    return LimitingReport(theta, lyapunov_exact(theta), mean, grp)


def limiting_average_numeric(mu: PseudoMeasure, theta: PeriodicCF, n: int) -> List[float]:
    """The literal (n+1)-term average (1/(lambda n)) sum_{k=1}^{n+1} v_{k-1},
    with exact summand arithmetic and the exact Lyapunov constant."""
    grp = mu.group
    total = grp.zero()
    for v in incremental_summands(mu, theta, n + 1):
        total = grp.add(total, v)
    lam = lyapunov_exact(theta).value()
    vec = total if hasattr(total, "__iter__") else (total,)
    return [float(x) / (lam * n) for x in vec]


def incremental_summands(mu: PseudoMeasure, theta: PeriodicCF, count: int) -> Iterator[Any]:
    """Yield v_k = mu(I_k(theta)) for k = 0..count-1.

    For measures over a coset-function module the segment values are
    computed by an incremental coset walk (no big integers): the segment
    matrices satisfy g_{k+1} = g_k * (S T^{m_k}) with m_k = (-1)^k a_{k+2}
    in terms of the partial quotients a_j (a_0 = k0)."""
    grp = mu.group
    if not isinstance(grp, CosetFunctionModule):
        segs = theta.convergent_segments(count)
        for s in segs:
            yield mu.evaluate(s.a, s.b)
        return
    space = grp.space
    omega = mu.evaluate(INFINITY, ProjectiveRational(0))
    a_list = [theta.k0] + theta.digits(count + 1)
    # the first segment (inf, k0) is carried by T^{k0}; the walk then moves
    # right by S T^{m_j} with m_j = (-1)^{j+1} a_{j+1}
    g_start = UnimodularMatrix(1, a_list[0], 0, 1)
    rows = [space.right_mul(i, g_start) for i in range(space.size)]
    # shifting a coset only needs the class increment of the step element
    shift_of: Dict[int, int] = {}
    classes, index_of, modulus = space.classes, space.index_of, space.modulus
    for j in range(count):
        yield grp.value(tuple(omega[rows[i]] for i in range(space.size)))
        m = -a_list[j + 1] if j % 2 == 0 else a_list[j + 1]
        inc = shift_of.get(m)
        if inc is None:
            inc = space.phi(step_element(m))
            shift_of[m] = inc
        rows = [index_of[(classes[i] + inc) % modulus] for i in rows]


class LimitingValue:
    """Formal combination of limiting endpoint values mu^lim(inf, theta_i)
    with integer coefficients; pairs (theta, eta) are stored as the
    difference of their infinity-based terms, so the antisymmetry and
    triangle identities hold exactly by cancellation."""

    def __init__(self, terms: Dict[PeriodicCF, Tuple[int, LimitingReport]]):
        self.terms = {k: (c, r) for k, (c, r) in terms.items() if c}

    @staticmethod
    def single(report: LimitingReport, coeff: int = 1) -> "LimitingValue":
        return LimitingValue({report.theta: (coeff, report)})

    def __add__(self, other: "LimitingValue") -> "LimitingValue":
        terms = dict(self.terms)
        for k, (c, r) in other.terms.items():
            if k in terms:
                terms[k] = (terms[k][0] + c, r)
            else:
                terms[k] = (c, r)
        return LimitingValue(terms)

    def __neg__(self) -> "LimitingValue":
        return LimitingValue({k: (-c, r) for k, (c, r) in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return all(c == 0 or r.is_zero() for c, r in self.terms.values())

    def __eq__(self, other):
        return isinstance(other, LimitingValue) and (self - other).is_zero()

    def numeric(self) -> Optional[List[float]]:
        out = None
        for c, r in self.terms.values():
            vec = [c * x for x in r.numeric()]
            out = vec if out is None else [a + b for a, b in zip(out, vec)]
        return out


def limiting_pair(mu: PseudoMeasure, theta: PeriodicCF, eta: PeriodicCF) -> LimitingValue:
    """mu^lim(theta, eta) = mu^lim(theta, inf) + mu^lim(inf, eta)
    = -mu^lim(inf, theta) + mu^lim(inf, eta), kept as a formal combination."""
    lhs = LimitingValue.single(limiting_measure(mu, theta), -1)
    rhs = LimitingValue.single(limiting_measure(mu, eta), +1)
    return lhs + rhs


# ---------------------------------------------------------------------------
# tree-path edges toward an irrational and current averaging


def tree_path_arcs(theta: PeriodicCF, count: int) -> List[PrimitiveSegment]:
    """The nested tessellation arcs along the unique tree path toward theta,
    positively oriented as the away-edge intervals."""
    val = theta.value()
    base = [PrimitiveSegment(INFINITY, ProjectiveRational(0)),
            PrimitiveSegment(ProjectiveRational(0), ProjectiveRational(1)),
            PrimitiveSegment(ProjectiveRational(1), INFINITY)]
    arc = next((b for b in base if val.in_arc(b)), None)
    if arc is None:
        raise ValueError("value on a base cut?")
    out = []
    for _ in range(count):
        out.append(arc)
        m = arc_split_point(arc)
        left = PrimitiveSegment(arc.a, m)
        right = PrimitiveSegment(m, arc.b)
        arc = left if val.in_arc(left) else right
        if not (val.in_arc(left) ^ val.in_arc(right)):
            raise AssertionError("irrational target must lie in exactly one child")
    return out


def limiting_via_current(c: Current, theta: PeriodicCF) -> LimitingReport:
    """Average of the current over the path edges crossing the convergent
    arcs toward theta, oriented as traversed (the k-th arc runs from the
    (k-1)-st convergent to the k-th); exact closed form via periodicity."""
    grp = c.group
    p = len(theta.period)
    window = max(40, 8 * p + 4 * len(theta.preperiod) + 24)
    segs = theta.convergent_segments(window)
    vals = [c(edge_for_segment(s)) for s in segs]
    found = detect_period(vals, grp.eq)
    if found is None:
        raise NonConvergent("no eventual period along the path")
    start, per = found
    cyc = vals[start:start + per]
    mean = grp.scalar_mul(Fraction(1, per), grp.total(cyc))
    return LimitingReport(theta, lyapunov_exact(theta), mean, grp)
