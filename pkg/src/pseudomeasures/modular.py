"""Modular boundary measures: seed-space classification, modularity checks,
induced measures, group cocycles, and Hecke operators with exact eigen-data.

A measure over a left module W is modular when mu(g a, g b) = g[mu(a, b)].
Such measures are classified by their single value at (inf, 0), which must
lie in the simultaneous kernel of 1 + sigma and 1 + tau + tau^2; that kernel
is computed here by exact row reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .boundary import (
    INFINITY,
    IDENTITY,
    SIGMA,
    TAU,
    ProjectiveRational,
    RationalMatrix,
    UnimodularMatrix,
    as_point,
)
from .chains import PrimitiveSegment, primitive_segments, segment_matrix
from .coeffmodules import CosetSpace, InducedModule, PolynomialModule, eisenstein_vector
from .linalg import charpoly, kernel_basis, mat_vec, rational_roots, solve
from .measures import PreMeasure, PseudoMeasure, ValidationReport, ValueGroup, Witness, validate_premeasure


class SeedError(ValueError):
    pass


def check_seed(group: ValueGroup, omega) -> bool:
    """(1 + sigma) w = 0 and (1 + tau + tau^2) w = 0."""
    s = group.add(omega, group.act(SIGMA, omega))
    t = group.add(omega, group.add(group.act(TAU, omega), group.act(TAU * TAU, omega)))
    return group.is_zero(s) and group.is_zero(t)


def from_seed(group: ValueGroup, omega, validate_depth: int = 0) -> PseudoMeasure:
    """The modular measure with value omega at (inf, 0).

    The rule sends the primitive segment (g inf, g 0) to g[omega]; the seed
    conditions make this a pre-measure, hence a measure, and modularity is
    automatic.
    """
    if not check_seed(group, omega):
        raise SeedError("seed must be killed by 1+sigma and 1+tau+tau^2")
    rule = lambda seg: group.act(segment_matrix(seg), omega)
    mu = PseudoMeasure(PreMeasure(rule, group, "seed"), name="seed-measure")
    if validate_depth:
        report = validate_premeasure(mu.pre, validate_depth)
        if not report:
            raise SeedError(f"seed rule failed validation: {report.failures[:1]}")
    return mu


def seed_space(module) -> List[Any]:
    """Exact basis of Ker(1+sigma) & Ker(1+tau+tau^2) on the module.

    The module must expose dim/basis/action_matrix.  For the polynomial
    module in odd degree the space is zero (-id acts by -1 there).
    """
    n = module.dim
    if n == 0:
        return []
    a_sigma = module.action_matrix(SIGMA)
    a_tau = module.action_matrix(TAU)
    a_tau2 = module.action_matrix(TAU * TAU)
    rows = []
    for i in range(n):
        rows.append([(1 if i == j else 0) + a_sigma[i][j] for j in range(n)])
    for i in range(n):
        rows.append([(1 if i == j else 0) + a_tau[i][j] + a_tau2[i][j] for j in range(n)])
    rows = [[Fraction(x) for x in row] for row in rows]
    basis = kernel_basis(rows, n)
    out = []
    for vec in basis:
        out.append(module.value(vec))
    return out


def polynomial_seed_space(weight: int) -> Tuple[PolynomialModule, List[tuple]]:
    module = PolynomialModule(weight)
    return module, seed_space(module)


@dataclass
class ModularityReport:
    ok: bool
    checked: int
    witness: Optional[Tuple[UnimodularMatrix, PrimitiveSegment, Any, Any]] = None

    def __bool__(self):
        return self.ok


def modularity_check(mu: PseudoMeasure, generators: Sequence[UnimodularMatrix] = (SIGMA, TAU),
                     depth: int = 8, window: Tuple[int, int] = (-2, 3)) -> ModularityReport:
    """Verify mu(g a, g b) = g[mu(a, b)] on all primitive segments up to depth."""
    grp = mu.group
    checked = 0
    for seg in primitive_segments(depth, *window):
        for g in generators:
            checked += 1
            lhs = mu.evaluate(g(seg.a), g(seg.b))
            rhs = grp.act(g, mu.evaluate(seg.a, seg.b))
            if not grp.eq(lhs, rhs):
                return ModularityReport(False, checked, (g, seg, lhs, rhs))
    return ModularityReport(True, checked)


# ---------------------------------------------------------------------------
# induced measures (finite index subgroups via the coset module)


def induce(mu: PseudoMeasure, induced: InducedModule) -> PseudoMeasure:
    """Gamma-modular W-measure -> SL(2,Z)-modular measure over the induced module:
    mu_hat(a, b)(rep_i) = mu(rep_i a, rep_i b)."""
    reps = induced.space.representatives()

    def rule(seg: PrimitiveSegment):
        return tuple(mu.evaluate(h(seg.a), h(seg.b)) for h in reps)

    return PseudoMeasure(PreMeasure(rule, induced, "induced"), name="induced")


def restrict(mu_hat: PseudoMeasure) -> PseudoMeasure:
    """Inverse of induce: evaluate at the identity coset."""
    induced = mu_hat.group
    if not isinstance(induced, InducedModule):
        raise ValueError("restrict expects a measure over an induced module")
    base = induced.base
    rule = lambda seg: mu_hat.segment_value(seg)[0]
    return PseudoMeasure(PreMeasure(rule, base, "restricted"), name="restricted")


# ---------------------------------------------------------------------------
# cocycles


class Cocycle:
    """c_alpha(g) = mu(g alpha, alpha); satisfies c(gh) = c(g) + g c(h)."""

    def __init__(self, mu: PseudoMeasure, alpha):
        self.mu = mu
        self.alpha = as_point(alpha)

    def __call__(self, g: UnimodularMatrix):
        return self.mu.evaluate(g(self.alpha), self.alpha)

    def verify_relation(self, g: UnimodularMatrix, h: UnimodularMatrix) -> bool:
        grp = self.mu.group
        lhs = self(g * h)
        rhs = grp.add(self(g), grp.act(g, self(h)))
        return grp.eq(lhs, rhs)


def cocycle(mu: PseudoMeasure, alpha) -> Cocycle:
    return Cocycle(mu, alpha)


# ---------------------------------------------------------------------------
# Hecke operators


def hecke_cosets(n: int) -> List[RationalMatrix]:
    """Representatives (a, b; 0, d) with ad = n, 0 < b <= d of the degree-n
    integer-matrix double coset modulo SL(2,Z)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    for d in range(1, n + 1):
        if n % d:
            continue
        a = n // d
        for b in range(1, d + 1):
            out.append(RationalMatrix(a, b, 0, d))
    return out


def hecke(mu: PseudoMeasure, cosets) -> PseudoMeasure:
    """T mu = sum_i delta_i^{-1} mu delta_i over the coset representatives."""
    if isinstance(cosets, int):
        cosets = hecke_cosets(cosets)
    grp = mu.group
    if not grp.has_rational_action:
        raise ValueError("Hecke operators need a GL(2,Q) action on values")
    inverses = [(d, d.inverse()) for d in cosets]

    def rule(seg: PrimitiveSegment):
        total = grp.zero()
        for delta, dinv in inverses:
            total = grp.add(total, grp.act_rational(dinv, mu.evaluate(delta(seg.a), delta(seg.b))))
        return total

    return PseudoMeasure(PreMeasure(rule, grp, f"hecke"), name=f"T*{mu.name}")


def sigma_power_sum(n: int, k: int) -> int:
    """sum of d^k over divisors d of n."""
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


@dataclass
class HeckeReport:
    n: int
    weight: int
    basis: List[tuple]
    matrix: List[List[Fraction]]          # action on the seed basis, exact
    charpoly: List[Fraction]
    raw_eigenvalues: Dict[Fraction, int]
    eisenstein_raw: Optional[Fraction]    # raw eigenvalue on X^w - Y^w
    scale: Optional[Fraction]             # classical / raw normalization factor
    normalized_eigenvalues: Dict[Fraction, int]

    def to_json(self) -> dict:
        module = PolynomialModule(self.weight)
        return {
            "n": self.n,
            "weight": self.weight,
            "basis": [module.value_to_json(b) for b in self.basis],
            "matrix": [[str(x) for x in row] for row in self.matrix],
            "charpoly": [str(c) for c in self.charpoly],
            "raw_eigenvalues": {str(k): v for k, v in sorted(self.raw_eigenvalues.items())},
            "eisenstein_raw": None if self.eisenstein_raw is None else str(self.eisenstein_raw),
            "scale": None if self.scale is None else str(self.scale),
            "normalized_eigenvalues": {str(k): v for k, v in sorted(self.normalized_eigenvalues.items())},
        }


def coordinates_in(basis: Sequence[tuple], value: tuple) -> Optional[List[Fraction]]:
    cols = len(basis)
    rows = len(value)
    a = [[Fraction(basis[j][i]) for j in range(cols)] for i in range(rows)]
    return solve(a, [Fraction(v) for v in value])


def hecke_matrix(n: int, weight: int) -> HeckeReport:
    """Exact matrix of T_n on the seed space in degree `weight`.

    The raw operator follows the coset-sum convention; the report also
    rescales the spectrum so that the eigenvalue on X^w - Y^w equals the
    classical sum of (w+1)-st powers of divisors, recording the factor.
    """
    module, basis = polynomial_seed_space(weight)
    cosets = hecke_cosets(n)
    columns = []
    for omega in basis:
        mu = from_seed(module, omega)
        image = hecke(mu, cosets).evaluate(INFINITY, 0)
        coords = coordinates_in(basis, image)
        if coords is None:
            raise RuntimeError("Hecke image left the seed space; coset family is incomplete")
        columns.append(coords)
    dim = len(basis)
    matrix = [[columns[j][i] for j in range(dim)] for i in range(dim)]
    cp = charpoly(matrix) if dim else [Fraction(1)]
    raw_eigs = rational_roots(cp) if dim else {}
    eis = eisenstein_vector(module)
    eis_coords = coordinates_in(basis, eis) if dim else None
    eis_raw = None
    scale = None
    normalized: Dict[Fraction, int] = {}
    if eis_coords is not None and any(eis_coords):
        image = mat_vec(matrix, eis_coords)
        ratios = {Fraction(image[i], eis_coords[i]) for i in range(dim) if eis_coords[i]}
        if len(ratios) == 1:
            eis_raw = ratios.pop()
            if eis_raw:
                scale = Fraction(sigma_power_sum(n, weight + 1)) / eis_raw
                normalized = {ev * scale: m for ev, m in raw_eigs.items()}
    return HeckeReport(n, weight, basis, matrix, cp, raw_eigs, eis_raw, scale, normalized)
