"""Concrete value groups: homogeneous polynomial modules with the GL(2)
action, rational higher differentials, coset spaces with induced modules,
and finite permutation modules over coset spaces."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .boundary import IDENTITY, SIGMA, TAU, RationalMatrix, UnimodularMatrix, psl_word
from .measures import ValueGroup

# ---------------------------------------------------------------------------
# homogeneous polynomials in X, Y of fixed degree


def _binomial_power(a: Fraction, b: Fraction, n: int) -> List[Fraction]:
    """Coefficients of (a X + b Y)^n in the basis X^n, X^{n-1}Y, ..., Y^n."""
    return [comb(n, k) * a ** (n - k) * b ** k for k in range(n + 1)]


def _homog_mul(p: List[Fraction], q: List[Fraction]) -> List[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi:
            for j, qj in enumerate(q):
                if qj:
                    out[i + j] += pi * qj
    return out


class PolynomialModule(ValueGroup):
    """Homogeneous degree-w polynomials over Q.

    Values are coefficient tuples (X^w, X^{w-1}Y, ..., Y^w).  The right
    GL(2) action substitutes ((aX+bY)/det, (cX+dY)/det); the left action is
    the right action of the inverse.  A scalar matrix t*id therefore acts by
    t^{-w}, so -id is trivial exactly in even degree.
    """

    def __init__(self, degree: int):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        self.degree = degree
        self.name = f"PolyW({degree})"

    @property
    def dim(self) -> int:
        return self.degree + 1

    def zero(self):
        return tuple([Fraction(0)] * (self.degree + 1))

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def eq(self, x, y):
        return tuple(x) == tuple(y)

    def scalar_mul(self, q, x):
        q = Fraction(q)
        return tuple(q * a for a in x)

    def value(self, coeffs: Sequence) -> tuple:
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) != self.degree + 1:
            raise ValueError(f"need {self.degree + 1} coefficients")
        return tuple(coeffs)

    def monomial(self, i: int) -> tuple:
        """X^{w-i} Y^i."""
        v = [Fraction(0)] * (self.degree + 1)
        v[i] = Fraction(1)
        return tuple(v)

    def basis(self) -> List[tuple]:
        return [self.monomial(i) for i in range(self.dim)]

    def right_action(self, p, g) -> tuple:
        """(P g)(X, Y) = P((aX+bY)/det, (cX+dY)/det), expanded exactly."""
        a, b, c, d = (Fraction(x) for x in (g.a, g.b, g.c, g.d))
        det = a * d - b * c
        if det == 0:
            raise ValueError("singular matrix")
        u = (a / det, b / det)
        v = (c / det, d / det)
        w = self.degree
        out = [Fraction(0)] * (w + 1)
        if w == 0:
            return (Fraction(p[0]),)
        for i, coeff in enumerate(p):
            if not coeff:
                continue
            term = _homog_mul(_binomial_power(u[0], u[1], w - i), _binomial_power(v[0], v[1], i))
            for j, t in enumerate(term):
                out[j] += coeff * t
        return tuple(out)

    def act(self, g: UnimodularMatrix, x):
        return self.right_action(x, g.inverse())

    def act_rational(self, g: RationalMatrix, x):
        return self.right_action(x, g.inverse())

    def action_matrix(self, g) -> List[List[Fraction]]:
        """Matrix of the left action (columns are images of the monomials)."""
        cols = [self.act(g, e) if isinstance(g, UnimodularMatrix) else self.act_rational(g, e)
                for e in self.basis()]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def to_string(self, p) -> str:
        w = self.degree
        bits = []
        for i, c in enumerate(p):
            if not c:
                continue
            mono = []
            if w - i:
                mono.append("X" + (f"^{w - i}" if w - i > 1 else ""))
            if i:
                mono.append("Y" + (f"^{i}" if i > 1 else ""))
            m = "*".join(mono) or "1"
            bits.append(f"{'+' if c > 0 else '-'} {abs(c)}*{m}")
        text = " ".join(bits) or "0"
        return text.lstrip("+ ").strip()

    def value_to_json(self, x):
        return [str(c) for c in x]

    def value_from_json(self, data):
        return self.value([Fraction(c) for c in data])


def eisenstein_vector(module: PolynomialModule) -> tuple:
    """X^w - Y^w, the normalization anchor for Hecke eigen-data."""
    w = module.degree
    v = [Fraction(0)] * (w + 1)
    v[0] = Fraction(1)
    v[w] += Fraction(-1)
    return tuple(v)


# ---------------------------------------------------------------------------
# exact univariate rational functions (for rational period functions)


def _poly_trim(c: List[Fraction]) -> List[Fraction]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_add(p, q):
    n = max(len(p), len(q))
    return _poly_trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def _poly_mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b:
                    out[i + j] += a * b
    return _poly_trim(out)


def _poly_scale(p, s):
    return _poly_trim([a * s for a in p])


def _poly_divmod(p, q):
    p = p[:]
    if not q:
        raise ZeroDivisionError
    quot = [Fraction(0)] * max(0, len(p) - len(q) + 1)
    while len(p) >= len(q) and p:
        f = p[-1] / q[-1]
        k = len(p) - len(q)
        quot[k] = f
        for i, b in enumerate(q):
            p[k + i] -= f * b
        _poly_trim(p)
    return _poly_trim(quot), p


def _poly_gcd(p, q):
    p, q = p[:], q[:]
    while q:
        p, q = q, _poly_divmod(p, q)[1]
    if p:
        p = _poly_scale(p, 1 / p[-1])
    return p


class RationalFunction:
    """num(z)/den(z) over Q, reduced, with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=(Fraction(1),)):
        num = _poly_trim([Fraction(c) for c in num])
        den = _poly_trim([Fraction(c) for c in den])
        if not den:
            raise ZeroDivisionError("zero denominator")
        if num:
            g = _poly_gcd(num, den)
            if len(g) > 1:
                num = _poly_divmod(num, g)[0]
                den = _poly_divmod(den, g)[0]
        else:
            den = [Fraction(1)]
        lead = den[-1]
        num = _poly_scale(num, 1 / lead)
        den = _poly_scale(den, 1 / lead)
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", tuple(den))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @staticmethod
    def from_string(num_coeffs, den_coeffs=(1,)) -> "RationalFunction":
        return RationalFunction([Fraction(c) for c in num_coeffs], [Fraction(c) for c in den_coeffs])

    def is_zero(self):
        return not self.num

    def __add__(self, other):
        return RationalFunction(
            _poly_add(_poly_mul(list(self.num), list(other.den)), _poly_mul(list(other.num), list(self.den))),
            _poly_mul(list(self.den), list(other.den)),
        )

    def __neg__(self):
        return RationalFunction(_poly_scale(list(self.num), Fraction(-1)), list(self.den))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return RationalFunction(_poly_mul(list(self.num), list(other.num)),
                                _poly_mul(list(self.den), list(other.den)))

    def __eq__(self, other):
        return isinstance(other, RationalFunction) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def compose_moebius(self, a: int, b: int, c: int, d: int) -> "RationalFunction":
        """q((az+b)/(cz+d)) as an exact rational function."""
        n = max(len(self.num), len(self.den)) - 1
        lin_num = [Fraction(b), Fraction(a)]   # b + a z
        lin_den = [Fraction(d), Fraction(c)]   # d + c z
        def homog(coeffs):
            out = []
            for i, ci in enumerate(coeffs):
                term = [Fraction(ci)]
                for _ in range(i):
                    term = _poly_mul(term, lin_num)
                for _ in range(n - i):
                    term = _poly_mul(term, lin_den)
                out = _poly_add(out, term)
            return out
        return RationalFunction(homog(list(self.num)), homog(list(self.den)))

    def mul_power_z(self, k: int) -> "RationalFunction":
        """Multiply by z^k (k may be negative)."""
        if k >= 0:
            return RationalFunction(_poly_mul(list(self.num), [Fraction(0)] * k + [Fraction(1)]), list(self.den))
        return RationalFunction(list(self.num), _poly_mul(list(self.den), [Fraction(0)] * (-k) + [Fraction(1)]))

    def mul_power_zm1(self, k: int) -> "RationalFunction":
        """Multiply by (z-1)^k (k may be negative)."""
        factor = [Fraction(1)]
        for _ in range(abs(k)):
            factor = _poly_mul(factor, [Fraction(-1), Fraction(1)])
        if k >= 0:
            return RationalFunction(_poly_mul(list(self.num), factor), list(self.den))
        return RationalFunction(list(self.num), _poly_mul(list(self.den), factor))


@dataclass(frozen=True)
class RationalDifferential:
    """q(z) (dz)^k with q an exact rational function over Q."""

    weight: int
    q: RationalFunction


def rpf_relations(f: RationalDifferential) -> Tuple[RationalFunction, RationalFunction]:
    """The two defect functions whose vanishing defines rational period
    functions of weight 2k: q(z) + z^{-2k} q(-1/z) and the three-term sum
    q(z) + z^{-2k} q(1 - 1/z) + (z-1)^{-2k} q(1/(1-z))."""
    k = f.weight
    q = f.q
    sigma_defect = q + q.compose_moebius(0, -1, 1, 0).mul_power_z(-2 * k)
    tau_defect = (
        q
        + q.compose_moebius(1, -1, 1, 0).mul_power_z(-2 * k)      # q((z-1)/z) = q(1 - 1/z)
        + q.compose_moebius(0, 1, -1, 1).mul_power_zm1(-2 * k)    # q(1/(1-z))
    )
    return sigma_defect, tau_defect


def rpf_validate(f: RationalDifferential) -> bool:
    s, t = rpf_relations(f)
    return s.is_zero() and t.is_zero()


# ---------------------------------------------------------------------------
# coset spaces of finite index subgroups, described by a homomorphism


class CosetSpace:
    """Right coset space Gamma \\ PSL(2,Z) with a right multiplication table.

    The subgroup is the kernel of a homomorphism to Z/m determined by the
    images of sigma and tau (which must satisfy 2*s = 3*t = 0 ... any images
    with 2*s == 0 and 3*t == 0 mod m give a genuine homomorphism, since
    PSL(2,Z) is the free product of Z/2 and Z/3).
    """

    def __init__(self, modulus: int, sigma_image: int, tau_image: int):
        if (2 * sigma_image) % modulus or (3 * tau_image) % modulus:
            raise ValueError("images must satisfy the orders of sigma and tau")
        self.modulus = modulus
        self.sigma_image = sigma_image % modulus
        self.tau_image = tau_image % modulus
        # classes actually reached (the homomorphism may not be onto Z/m)
        reached = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for img in (self.sigma_image, self.tau_image):
                y = (x + img) % modulus
                if y not in reached:
                    reached.add(y)
                    frontier.append(y)
        self.classes = sorted(reached)
        self.index_of = {c: i for i, c in enumerate(self.classes)}
        self.size = len(self.classes)
        self._reps: Optional[List[UnimodularMatrix]] = None
        # generator images as S, T words: T = tau^2 sigma
        self._phi_T = (2 * self.tau_image + self.sigma_image) % modulus
        self._phi_S = self.sigma_image

    def phi(self, g: UnimodularMatrix) -> int:
        """Class of g, computed through its S/T word."""
        total = 0
        for sym, n in psl_word(g):
            total += (self._phi_S if sym == "S" else n * self._phi_T)
        return total % self.modulus

    def coset_index(self, g: UnimodularMatrix) -> int:
        return self.index_of[self.phi(g)]

    def member(self, g: UnimodularMatrix) -> bool:
        return self.phi(g) == 0

    def representatives(self) -> List[UnimodularMatrix]:
        """One matrix per coset (breadth-first words in sigma, tau)."""
        if self._reps is None:
            reps: Dict[int, UnimodularMatrix] = {0: IDENTITY}
            frontier = [IDENTITY]
            while len(reps) < self.size and frontier:
                nxt = []
                for g in frontier:
                    for gen in (SIGMA, TAU, TAU * TAU):
                        h = g * gen
                        c = self.phi(h)
                        if c not in reps:
                            reps[c] = h
                            nxt.append(h)
                frontier = nxt
            self._reps = [reps[c] for c in self.classes]
        return self._reps

    def right_mul(self, i: int, g: UnimodularMatrix) -> int:
        """Index of (coset i) * g."""
        return self.index_of[(self.classes[i] + self.phi(g)) % self.modulus]

    def right_mul_twist(self, i: int, g: UnimodularMatrix) -> Tuple[int, UnimodularMatrix]:
        """(j, gamma) with rep_i * g = gamma * rep_j and gamma in the subgroup."""
        reps = self.representatives()
        j = self.right_mul(i, g)
        gamma = reps[i] * g * reps[j].inverse()
        return j, gamma


def trivial_coset_space() -> CosetSpace:
    return CosetSpace(1, 0, 0)


def abelianized_coset_space() -> CosetSpace:
    """The index-6 space from the abelianization PSL(2,Z) -> Z/6
    (sigma -> 3, tau -> 2)."""
    return CosetSpace(6, 3, 2)


def sigma_parity_coset_space() -> CosetSpace:
    """Index-2 space from sigma -> 1, tau -> 0 in Z/2."""
    return CosetSpace(2, 1, 0)


class CosetFunctionModule(ValueGroup):
    """W = functions P -> Q on a coset space, with (g w)(s) = w(s g).

    The left PSL(2,Z) action factors through the finite coset data, which is
    exactly the setting where Gauss-shift limits have periodic summands.
    """

    def __init__(self, space: CosetSpace):
        self.space = space
        self.name = f"Q[P]({space.size})"

    @property
    def dim(self) -> int:
        return self.space.size

    def zero(self):
        return tuple([Fraction(0)] * self.dim)

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def eq(self, x, y):
        return tuple(x) == tuple(y)

    def scalar_mul(self, q, x):
        q = Fraction(q)
        return tuple(q * a for a in x)

    def value(self, coeffs) -> tuple:
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) != self.dim:
            raise ValueError(f"need {self.dim} coefficients")
        return tuple(coeffs)

    def basis(self):
        return [tuple(Fraction(1 if i == j else 0) for j in range(self.dim)) for i in range(self.dim)]

    def act(self, g: UnimodularMatrix, x):
        sp = self.space
        return tuple(x[sp.right_mul(i, g)] for i in range(self.dim))

    def action_matrix(self, g) -> List[List[Fraction]]:
        cols = [self.act(g, e) for e in self.basis()]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def value_to_json(self, x):
        return [str(c) for c in x]

    def value_from_json(self, data):
        return self.value([Fraction(c) for c in data])


class InducedModule(ValueGroup):
    """Hom_Gamma(PSL(2,Z), W) realized as P-indexed tuples of base values.

    Elements store one base value per coset representative; the left action
    permutes the slots by right multiplication and twists each value by the
    subgroup element that re-aligns representatives.
    """

    def __init__(self, base: ValueGroup, space: CosetSpace):
        if not base.has_action:
            raise ValueError("base group needs a PSL(2,Z) action")
        self.base = base
        self.space = space
        self.name = f"Induced({base.name}, {space.size})"

    def zero(self):
        return tuple([self.base.zero()] * self.space.size)

    def add(self, x, y):
        return tuple(self.base.add(a, b) for a, b in zip(x, y))

    def neg(self, x):
        return tuple(self.base.neg(a) for a in x)

    def eq(self, x, y):
        return all(self.base.eq(a, b) for a, b in zip(x, y))

    def act(self, g: UnimodularMatrix, x):
        out = []
        for i in range(self.space.size):
            j, gamma = self.space.right_mul_twist(i, g)
            out.append(self.base.act(gamma, x[j]))
        return tuple(out)

    def wrap(self, values: Sequence) -> tuple:
        """Package a P-indexed tuple of base values as a module element."""
        vals = tuple(values)
        if len(vals) != self.space.size:
            raise ValueError("one value per coset required")
        return vals

    def unwrap(self, x) -> tuple:
        return tuple(x)

    def value_to_json(self, x):
        return [self.base.value_to_json(v) for v in x]

    def value_from_json(self, data):
        return tuple(self.base.value_from_json(d) for d in data)
