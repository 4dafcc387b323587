"""Gauge-ball functionals on the first Heisenberg group.

Everything here integrates exact polynomials (compiled to float evaluators)
against the gauge kernel rho**(alpha - Q) |grad_H rho|^2 over balls B_r, or
against the horizontal surface weight over gauge spheres.  The quadrature
grid is the tensor rule from :mod:`carnotlab.quadrature`; Monte Carlo
cross-checks live in the test suite, not here.

Conventions:
  * the height functional  M_alpha(f, r) = r**-alpha * integral_{B_r}
    f rho**(alpha-Q) |grad_H rho|^2 dg,
  * the Dirichlet functional D_alpha(f, r) applies M_alpha to the carre du
    champ |grad f|^2 of the chosen invariant side,
  * omega_alpha = M_alpha(1, r), which is independent of r,
  * the frequency N(f, r) = r * integral_{B_r} |grad_H f|^2 dg divided by
    the sphere integral of f^2 against the horizontal surface weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .fields import (
    carre_du_champ,
    dilation_field,
    horizontal_laplacian,
    theta_field,
)
from .numeval import horizontal_gauge_gradient_sq_numeric, poly_evaluator
from .poly import Poly
from .quadrature import QuadratureGrid, ball_integral, default_grid, surface_integral

_TINY = 1e-300


def _require_h1(f: Poly) -> None:
    if f.shape != (2, 1):
        raise ValueError(
            "expected a polynomial on the first Heisenberg group "
            f"(2 horizontal + 1 vertical variable), got shape {f.shape}"
        )


def _grad_sq(x, y, s):
    return horizontal_gauge_gradient_sq_numeric((x, y), (s,))


def _spec(grid: QuadratureGrid):
    return grid.chart.spec


def omega(alpha: float, grid: QuadratureGrid | None = None, *, r: float = 1.0) -> float:
    """The gauge constant omega_alpha = M_alpha(1, r)."""
    grid = grid or default_grid()
    q_hom = _spec(grid).Q
    return ball_integral(_grad_sq, r, grid, rho_power=alpha - q_hom) / r**alpha


@dataclass(frozen=True)
class OmegaScan:
    alpha: float
    radii: tuple[float, ...]
    values: tuple[float, ...]
    max_rel_deviation: float


def omega_r_independence(
    alpha: float, radii: Sequence[float], grid: QuadratureGrid | None = None
) -> OmegaScan:
    """Evaluate omega_alpha at several radii and report the relative spread."""
    grid = grid or default_grid()
    values = tuple(omega(alpha, grid, r=r) for r in radii)
    center = values[0]
    dev = max(abs(v - center) for v in values) / max(abs(center), _TINY)
    return OmegaScan(alpha, tuple(radii), values, dev)


def m_alpha(
    f: Poly, alpha: float, r: float, grid: QuadratureGrid | None = None
) -> float:
    """Height functional of f at radius r."""
    _require_h1(f)
    grid = grid or default_grid()
    q_hom = _spec(grid).Q
    ev = poly_evaluator(f)

    def h(x, y, s):
        return ev((x, y, s)) * _grad_sq(x, y, s)

    return ball_integral(h, r, grid, rho_power=alpha - q_hom) / r**alpha


def d_alpha(
    f: Poly,
    alpha: float,
    r: float,
    grid: QuadratureGrid | None = None,
    *,
    side: str = "right",
) -> float:
    """Dirichlet functional: M_alpha applied to the carre du champ of f."""
    _require_h1(f)
    grid = grid or default_grid()
    return m_alpha(carre_du_champ(_spec(grid), f, side=side), alpha, r, grid)


@dataclass(frozen=True)
class SplitDirichlet:
    """The two half Dirichlet functionals and their product at one radius."""

    r: float
    factor_plus: float
    factor_minus: float

    @property
    def product(self) -> float:
        return self.factor_plus * self.factor_minus


def acf_product(
    f: Poly,
    r: float,
    grid: QuadratureGrid | None = None,
    *,
    alpha: float = 2.0,
    side: str = "right",
) -> SplitDirichlet:
    """Product of the Dirichlet functionals of the positive and negative parts.

    The gradient of max(f, 0) agrees with that of f on {f > 0} and vanishes
    elsewhere, so each factor integrates the carre du champ of f masked by
    the sign of f; each factor carries its own r**-alpha normalization.
    """
    _require_h1(f)
    grid = grid or default_grid()
    q_hom = _spec(grid).Q
    fev = poly_evaluator(f)
    cev = poly_evaluator(carre_du_champ(_spec(grid), f, side=side))

    def factor(sign: float) -> float:
        def h(x, y, s):
            mask = sign * fev((x, y, s)) > 0.0
            return cev((x, y, s)) * mask * _grad_sq(x, y, s)

        return ball_integral(h, r, grid, rho_power=alpha - q_hom) / r**alpha

    return SplitDirichlet(r=r, factor_plus=factor(1.0), factor_minus=factor(-1.0))


def surface_average(
    g: Poly, r: float, grid: QuadratureGrid | None = None
) -> float:
    """Average of g over the gauge sphere S_r against the horizontal weight."""
    _require_h1(g)
    grid = grid or default_grid()
    ev = poly_evaluator(g)
    num = surface_integral(lambda x, y, s: ev((x, y, s)), r, grid, weighted=True)
    den = surface_integral(lambda x, y, s: np.ones_like(x), r, grid, weighted=True)
    return num / den


def _require_harmonic(spec, f: Poly, *, who: str) -> None:
    if not horizontal_laplacian(spec, f).is_zero():
        raise ValueError(f"{who} requires a horizontally harmonic polynomial")


@dataclass(frozen=True)
class IdentityDefect:
    lhs: float
    rhs: float

    @property
    def defect(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def rel_defect(self) -> float:
        return self.defect / max(abs(self.lhs), abs(self.rhs), _TINY)


def dirichlet_identity_defect(
    f: Poly, r: float, grid: QuadratureGrid | None = None
) -> IdentityDefect:
    """Solid Dirichlet energy of a harmonic f versus its sphere form.

    For horizontally harmonic f the divergence theorem turns the ball
    integral of |grad_H f|^2 into a sphere integral of f Zf against the
    horizontal weight (Z the dilation generator); both sides are computed
    independently and compared.
    """
    _require_h1(f)
    grid = grid or default_grid()
    spec = _spec(grid)
    _require_harmonic(spec, f, who="the Dirichlet sphere identity")
    cev = poly_evaluator(carre_du_champ(spec, f, side="left"))
    lhs = ball_integral(lambda x, y, s: cev((x, y, s)), r, grid)
    fzf = f * dilation_field(spec).apply(f)
    zev = poly_evaluator(fzf)
    rhs = surface_integral(lambda x, y, s: zev((x, y, s)), r, grid, weighted=True) / r
    return IdentityDefect(lhs=lhs, rhs=rhs)


@dataclass(frozen=True)
class FrequencyValue:
    r: float
    value: float
    surface_value: float

    @property
    def rel_diff(self) -> float:
        return abs(self.value - self.surface_value) / max(
            abs(self.value), abs(self.surface_value), _TINY
        )


def frequency(
    f: Poly, r: float, grid: QuadratureGrid | None = None
) -> FrequencyValue:
    """Frequency of a harmonic f at radius r, by two independent routes.

    ``value`` uses the solid Dirichlet integral; ``surface_value`` replaces
    it with the sphere integral of f Zf.  The two agree exactly for
    harmonic f, so their spread measures quadrature error.
    """
    _require_h1(f)
    if f.is_zero():
        raise ValueError("frequency of the zero polynomial is undefined")
    grid = grid or default_grid()
    spec = _spec(grid)
    _require_harmonic(spec, f, who="the frequency functional")
    cev = poly_evaluator(carre_du_champ(spec, f, side="left"))
    sqev = poly_evaluator(f * f)
    zev = poly_evaluator(f * dilation_field(spec).apply(f))
    dirichlet = ball_integral(lambda x, y, s: cev((x, y, s)), r, grid)
    height = surface_integral(lambda x, y, s: sqev((x, y, s)), r, grid, weighted=True)
    sphere = surface_integral(lambda x, y, s: zev((x, y, s)), r, grid, weighted=True)
    if abs(height) < _TINY:
        raise ValueError("frequency denominator vanishes at this radius")
    return FrequencyValue(r=r, value=r * dirichlet / height, surface_value=sphere / height)


@dataclass(frozen=True)
class TwoTermFrequency:
    """Frequency of f = p_h + p_k from sphere moments of the two pieces.

    a, b, c are the unit-sphere moments of p_h^2, -(p_h p_k), p_k^2 against
    the horizontal weight; h < k are the homogeneities.  The closed form
    below follows from Z p = (degree) p on homogeneous p.
    """

    h: int
    k: int
    a: float
    b: float
    c: float

    def denominator(self, r: float) -> float:
        s = r ** (self.k - self.h)
        return self.a - 2.0 * self.b * s + self.c * s * s

    def excess(self, r: float) -> float:
        """N(f, r) - h."""
        s = r ** (self.k - self.h)
        return (self.k - self.h) * (-self.b * s + self.c * s * s) / self.denominator(r)

    def value(self, r: float) -> float:
        return self.h + self.excess(r)


def frequency_two_term(
    p_h: Poly, p_k: Poly, grid: QuadratureGrid | None = None
) -> TwoTermFrequency:
    """Sphere moments of a two-piece harmonic sum, with the closed form."""
    _require_h1(p_h)
    _require_h1(p_k)
    grid = grid or default_grid()
    spec = _spec(grid)
    for p, name in ((p_h, "p_h"), (p_k, "p_k")):
        _require_harmonic(spec, p, who=f"the two-term frequency ({name})")
        if not p.is_homogeneous():
            raise ValueError(f"{name} must be homogeneous")
    h = p_h.weighted_degree()
    k = p_k.weighted_degree()
    if h is None or k is None or h >= k:
        raise ValueError(f"need degrees h < k, got h={h}, k={k}")

    def moment(p: Poly) -> float:
        ev = poly_evaluator(p)
        return surface_integral(
            lambda x, y, s: ev((x, y, s)), 1.0, grid, weighted=True
        )

    return TwoTermFrequency(
        h=h,
        k=k,
        a=moment(p_h * p_h),
        b=-moment(p_h * p_k),
        c=moment(p_k * p_k),
    )


def orthogonality_defect(
    p_h: Poly, p_k: Poly, grid: QuadratureGrid | None = None
) -> IdentityDefect:
    """Sphere pairing of two homogeneous harmonics versus its rotation form.

    lhs = (k - h) * integral_{S_1} p_h p_k against the horizontal weight;
    rhs = 4 * integral_{S_1} sigma (p_k Theta(p_h) - p_h Theta(p_k)) against
    the plain density, Theta the horizontal rotation field.  The two agree
    for harmonic homogeneous inputs; a nonzero common value witnesses that
    sphere harmonics of different degree need not be orthogonal here.
    """
    _require_h1(p_h)
    _require_h1(p_k)
    grid = grid or default_grid()
    spec = _spec(grid)
    for p, name in ((p_h, "p_h"), (p_k, "p_k")):
        _require_harmonic(spec, p, who=f"the orthogonality identity ({name})")
        if not p.is_homogeneous():
            raise ValueError(f"{name} must be homogeneous")
    h = p_h.weighted_degree()
    k = p_k.weighted_degree()
    pair_ev = poly_evaluator(p_h * p_k)
    lhs = (k - h) * surface_integral(
        lambda x, y, s: pair_ev((x, y, s)), 1.0, grid, weighted=True
    )
    theta = theta_field(spec, 0)
    sigma = Poly.variable(2, 2, 1)
    bracket = sigma * (p_k * theta.apply(p_h) - p_h * theta.apply(p_k))
    bev = poly_evaluator(bracket)
    rhs = 4.0 * surface_integral(
        lambda x, y, s: bev((x, y, s)), 1.0, grid, weighted=False
    )
    return IdentityDefect(lhs=lhs, rhs=rhs)


@dataclass(frozen=True)
class RepresentationDefect:
    value_at_identity: float
    surface_term: float
    solid_term: float

    @property
    def rhs(self) -> float:
        return self.surface_term - self.solid_term

    @property
    def defect(self) -> float:
        return abs(self.value_at_identity - self.rhs)


def mean_value_defect(
    psi: Poly, r: float, grid: QuadratureGrid | None = None
) -> RepresentationDefect:
    """Defect in the gauge mean-value representation of psi at the identity.

    psi(e) equals a weighted sphere average of psi minus a solid correction
    integrating Delta_H psi against the fundamental-solution kernel
    rho**(2-Q) - r**(2-Q); the normalizing constant is calibrated from the
    sphere measure itself, c = 1 / ((Q-2) * integral_{S_1} w).
    """
    _require_h1(psi)
    grid = grid or default_grid()
    spec = _spec(grid)
    q_hom = spec.Q
    total_weight = surface_integral(
        lambda x, y, s: np.ones_like(x), 1.0, grid, weighted=True
    )
    c = 1.0 / ((q_hom - 2) * total_weight)
    pev = poly_evaluator(psi)
    surface_term = (
        c
        * (q_hom - 2)
        * r ** (1 - q_hom)
        * surface_integral(lambda x, y, s: pev((x, y, s)), r, grid, weighted=True)
    )
    lap = horizontal_laplacian(spec, psi)
    if lap.is_zero():
        solid_term = 0.0
    else:
        lev = poly_evaluator(lap)
        singular = ball_integral(
            lambda x, y, s: lev((x, y, s)), r, grid, rho_power=float(2 - q_hom)
        )
        plain = ball_integral(lambda x, y, s: lev((x, y, s)), r, grid)
        solid_term = c * (singular - r ** (2 - q_hom) * plain)
    value = float(psi.eval_exact([Fraction(0)] * 3))
    return RepresentationDefect(
        value_at_identity=value, surface_term=surface_term, solid_term=solid_term
    )


@dataclass(frozen=True)
class ProbeRow:
    r: float
    factor_plus: float
    factor_minus: float
    product: float
    admissible_c: float


@dataclass(frozen=True)
class ProbeResult:
    base: float
    rows: tuple[ProbeRow, ...]

    @property
    def c_value(self) -> float:
        return max(row.admissible_c for row in self.rows)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.c_value) and math.isfinite(self.base)


def conjecture_probe(
    f: Poly,
    radii: Sequence[float],
    grid: QuadratureGrid | None = None,
    *,
    alpha: float = 2.0,
    side: str = "right",
) -> ProbeResult:
    """Smallest constant bounding the split product against its unit value.

    For each radius the product of the half Dirichlet functionals is
    compared with base = 1 + D(f+, 1) + D(f-, 1); the reported constant is
    the largest ratio over the grid.
    """
    _require_h1(f)
    grid = grid or default_grid()
    at_one = acf_product(f, 1.0, grid, alpha=alpha, side=side)
    base = 1.0 + at_one.factor_plus + at_one.factor_minus
    rows = []
    for r in radii:
        split = acf_product(f, r, grid, alpha=alpha, side=side)
        rows.append(
            ProbeRow(
                r=r,
                factor_plus=split.factor_plus,
                factor_minus=split.factor_minus,
                product=split.product,
                admissible_c=split.product / base,
            )
        )
    return ProbeResult(base=base, rows=tuple(rows))


def disk_quadratic_max(p: Poly, z_sq_bound: Fraction) -> Fraction:
    """Exact maximum of A x^2 + B y^2 + C over the disk |z|^2 <= bound.

    The input must be a polynomial in x^2, y^2 and a constant only.  On the
    disk the maximum is attained either at the origin or on the boundary
    with all mass on the larger coefficient, so it equals
    C + max(0, A, B) * bound.
    """
    if p.shape != (2, 1):
        raise ValueError("expected a polynomial on the first Heisenberg group")
    coeff_x2 = Fraction(0)
    coeff_y2 = Fraction(0)
    constant = Fraction(0)
    for exps, coeff in p.terms_sorted():
        if exps == (2, 0, 0, 0):
            coeff_x2 = coeff
        elif exps == (0, 2, 0, 0):
            coeff_y2 = coeff
        elif exps == (0, 0, 0, 0):
            constant = coeff
        else:
            raise ValueError(
                "disk_quadratic_max needs a polynomial in x^2, y^2 and 1 only"
            )
    bound = Fraction(z_sq_bound)
    return constant + max(Fraction(0), coeff_x2, coeff_y2) * bound
