"""Invariant vector fields and the horizontal calculus on step-2 groups.

Conventions, for a group with bracket matrices B^l:

    X_i       = d/dz_i - (1/2) sum_l (B^l z)_i d/ds_l      (left-invariant)
    Xr_i      = d/dz_i + (1/2) sum_l (B^l z)_i d/ds_l      (right-invariant)
    [X_i,X_j] = sum_l b^l_ij d/ds_l
    Z         = sum_i z_i d/dz_i + 2 sum_l s_l d/ds_l      (generator of dilations)
    Theta_l   = sum_{i<j} b^l_ij (z_i d/dz_j - z_j d/dz_i)

The horizontal Laplacian is sum_i X_i^2 (or the right version), and the carre
du champ |grad_H f|^2 = sum_i (X_i f)^2.  Left and right fields commute with
each other, which is what makes the right-sided Bochner identity exact with no
remainder; the left-sided expansion picks up commutator terms, computed here
term by term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .groups import GroupSpec
from .poly import Poly, monomials_of_weighted_degree

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class VectorField:
    """First-order operator sum_k coeffs[k] * d/d(var_k); one slot per variable, t last."""

    spec: GroupSpec
    coeffs: tuple[Poly, ...]

    def __post_init__(self):
        width = self.spec.m + self.spec.m2 + 1
        if len(self.coeffs) != width:
            raise ValueError(f"expected {width} coefficient polynomials, got {len(self.coeffs)}")

    def apply(self, p: Poly) -> Poly:
        out = Poly.zero(self.spec.m, self.spec.m2)
        for k, coeff in enumerate(self.coeffs):
            if not coeff.is_zero():
                out = out + coeff * p.derivative(k)
        return out

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.spec, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.spec, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scaled(self, c) -> "VectorField":
        return VectorField(self.spec, tuple(p * c for p in self.coeffs))


def apply(field: VectorField, p: Poly) -> Poly:
    return field.apply(p)


def commutator(a: VectorField, b: VectorField) -> VectorField:
    """[a, b] = a b - b a, again a first-order field."""
    if a.spec is not b.spec and a.spec != b.spec:
        raise ValueError("fields live on different groups")
    width = len(a.coeffs)
    coeffs = []
    for k in range(width):
        acc = Poly.zero(a.spec.m, a.spec.m2)
        for j in range(width):
            if not a.coeffs[j].is_zero():
                acc = acc + a.coeffs[j] * b.coeffs[k].derivative(j)
            if not b.coeffs[j].is_zero():
                acc = acc - b.coeffs[j] * a.coeffs[k].derivative(j)
        coeffs.append(acc)
    return VectorField(a.spec, tuple(coeffs))


def _zero_coeffs(spec: GroupSpec) -> list[Poly]:
    return [Poly.zero(spec.m, spec.m2) for _ in range(spec.m + spec.m2 + 1)]


def left_field(spec: GroupSpec, i: int) -> VectorField:
    coeffs = _zero_coeffs(spec)
    coeffs[i] = Poly.constant(1, spec.m, spec.m2)
    for ell in range(spec.m2):
        acc = Poly.zero(spec.m, spec.m2)
        for j in range(spec.m):
            bij = spec.B[ell][i][j]
            if bij != 0:
                acc = acc + Poly.variable(j, spec.m, spec.m2) * bij
        coeffs[spec.m + ell] = acc * (-HALF)
    return VectorField(spec, tuple(coeffs))


def right_field(spec: GroupSpec, i: int) -> VectorField:
    coeffs = _zero_coeffs(spec)
    coeffs[i] = Poly.constant(1, spec.m, spec.m2)
    for ell in range(spec.m2):
        acc = Poly.zero(spec.m, spec.m2)
        for j in range(spec.m):
            bij = spec.B[ell][i][j]
            if bij != 0:
                acc = acc + Poly.variable(j, spec.m, spec.m2) * bij
        coeffs[spec.m + ell] = acc * HALF
    return VectorField(spec, tuple(coeffs))


def vertical_field(spec: GroupSpec, ell: int) -> VectorField:
    coeffs = _zero_coeffs(spec)
    coeffs[spec.m + ell] = Poly.constant(1, spec.m, spec.m2)
    return VectorField(spec, tuple(coeffs))


def dilation_field(spec: GroupSpec) -> VectorField:
    coeffs = _zero_coeffs(spec)
    for i in range(spec.m):
        coeffs[i] = Poly.variable(i, spec.m, spec.m2)
    for ell in range(spec.m2):
        coeffs[spec.m + ell] = Poly.variable(spec.m + ell, spec.m, spec.m2) * 2
    return VectorField(spec, tuple(coeffs))


def theta_field(spec: GroupSpec, ell: int) -> VectorField:
    coeffs = _zero_coeffs(spec)
    for i in range(spec.m):
        for j in range(i + 1, spec.m):
            bij = spec.B[ell][i][j]
            if bij == 0:
                continue
            coeffs[j] = coeffs[j] + Poly.variable(i, spec.m, spec.m2) * bij
            coeffs[i] = coeffs[i] - Poly.variable(j, spec.m, spec.m2) * bij
    return VectorField(spec, tuple(coeffs))


def horizontal_fields(spec: GroupSpec, side: str = "left") -> list[VectorField]:
    if side == "left":
        return [left_field(spec, i) for i in range(spec.m)]
    if side == "right":
        return [right_field(spec, i) for i in range(spec.m)]
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def horizontal_gradient(spec: GroupSpec, p: Poly, side: str = "left") -> list[Poly]:
    return [f.apply(p) for f in horizontal_fields(spec, side)]


def horizontal_laplacian(spec: GroupSpec, p: Poly, side: str = "left") -> Poly:
    out = Poly.zero(spec.m, spec.m2)
    for f in horizontal_fields(spec, side):
        out = out + f.apply(f.apply(p))
    return out


def carre_du_champ(spec: GroupSpec, p: Poly, side: str = "left") -> Poly:
    out = Poly.zero(spec.m, spec.m2)
    for g in horizontal_gradient(spec, p, side):
        out = out + g * g
    return out


def bochner_residual_right(spec: GroupSpec, p: Poly) -> Poly:
    """Residual of: Lap_H |grad-right p|^2 = 2 sum_ij (X_i Xr_j p)^2 + 2 <grad-right p, grad-right Lap_H p>.

    Zero for every polynomial: left and right fields commute, so the usual flat
    Bochner computation goes through verbatim.
    """
    lefts = horizontal_fields(spec, "left")
    rights = horizontal_fields(spec, "right")
    lap = horizontal_laplacian(spec, p, "left")
    lhs = horizontal_laplacian(spec, carre_du_champ(spec, p, "right"), "left")
    hess = Poly.zero(spec.m, spec.m2)
    for xr in rights:
        xrp = xr.apply(p)
        for xl in lefts:
            mixed = xl.apply(xrp)
            hess = hess + mixed * mixed
    grad = Poly.zero(spec.m, spec.m2)
    for xr in rights:
        grad = grad + xr.apply(p) * xr.apply(lap)
    return lhs - 2 * hess - 2 * grad


@dataclass(frozen=True)
class BochnerLeftTerms:
    """Terms of the left-sided expansion of Lap_H |grad_H p|^2 on a step-2 group:

        lhs = hessian_term + gradient_term + vertical_term + mixed_term

    where hessian_term = 2 sum_ij ((X_iX_j + X_jX_i)p / 2)^2,
          gradient_term = 2 sum_i X_i p X_i(Lap_H p),
          vertical_term = (1/2) sum_ij ([X_i,X_j]p)^2,
          mixed_term = 4 sum_ij X_j p [X_i,X_j] X_i p.

    On step-2 groups [X_i,[X_i,X_j]] = 0, so these four terms are exhaustive
    and residual must be the zero polynomial.
    """

    lhs: Poly
    hessian_term: Poly
    gradient_term: Poly
    vertical_term: Poly
    mixed_term: Poly
    residual: Poly


def bochner_left_terms(spec: GroupSpec, p: Poly) -> BochnerLeftTerms:
    xs = horizontal_fields(spec, "left")
    grad = [x.apply(p) for x in xs]
    lap = horizontal_laplacian(spec, p, "left")
    lhs = horizontal_laplacian(spec, carre_du_champ(spec, p, "left"), "left")

    hessian = Poly.zero(spec.m, spec.m2)
    for i, xi in enumerate(xs):
        for j, xj in enumerate(xs):
            sym = (xi.apply(grad[j]) + xj.apply(grad[i])) * HALF
            hessian = hessian + sym * sym
    hessian = hessian * 2

    gradient = Poly.zero(spec.m, spec.m2)
    for i, xi in enumerate(xs):
        gradient = gradient + grad[i] * xi.apply(lap)
    gradient = gradient * 2

    brackets = [[commutator(xi, xj) for xj in xs] for xi in xs]
    vertical = Poly.zero(spec.m, spec.m2)
    for i in range(spec.m):
        for j in range(spec.m):
            bp = brackets[i][j].apply(p)
            vertical = vertical + bp * bp
    vertical = vertical * HALF

    mixed = Poly.zero(spec.m, spec.m2)
    for i in range(spec.m):
        for j in range(spec.m):
            mixed = mixed + grad[j] * brackets[i][j].apply(grad[i])
    mixed = mixed * 4

    residual = lhs - hessian - gradient - vertical - mixed
    return BochnerLeftTerms(lhs, hessian, gradient, vertical, mixed, residual)


def difference_residual(spec: GroupSpec, p: Poly) -> Poly:
    """Residual of: |grad_H p|^2 - |grad-right p|^2 = 2 sum_l (Theta_l p)(d p/ds_l)."""
    diff = carre_du_champ(spec, p, "left") - carre_du_champ(spec, p, "right")
    rhs = Poly.zero(spec.m, spec.m2)
    for ell in range(spec.m2):
        rhs = rhs + theta_field(spec, ell).apply(p) * p.derivative(spec.m + ell)
    return diff - 2 * rhs


def caloric_residual(spec: GroupSpec, p: Poly) -> Poly:
    """Lap_H p - dp/dt; zero (or constant) inputs are the caloric ones."""
    return horizontal_laplacian(spec, p, "left") - p.derivative(spec.m + spec.m2)


# harmonic bases via exact linear algebra


def _nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of {v : A v = 0} in reduced echelon parametrization (deterministic)."""
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [v * inv for v in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -mat[r][fc]
        basis.append(v)
    return basis


def harmonic_basis(spec: GroupSpec, kappa: int) -> list[Poly]:
    """Basis of homogeneous weighted-degree-kappa polynomials with Lap_H p = 0.

    Output is deterministic: monomials are taken in graded-lex order and each
    basis vector is scaled to integer coefficients with positive leading entry.
    """
    if kappa < 1:
        raise ValueError("kappa must be a positive integer")
    nz, ns = spec.m, spec.m2
    monos = sorted(
        monomials_of_weighted_degree(nz, ns, kappa),
        key=lambda e: (tuple(-x for x in e),),
    )
    target = {
        e: i
        for i, e in enumerate(
            sorted(monomials_of_weighted_degree(nz, ns, kappa - 2), key=lambda e: tuple(-x for x in e))
        )
    }
    rows = [[Fraction(0)] * len(monos) for _ in range(len(target))]
    for cidx, exps in enumerate(monos):
        image = horizontal_laplacian(spec, Poly({exps: Fraction(1)}, nz, ns))
        for e, coeff in image.terms.items():
            rows[target[e]][cidx] = coeff
    basis = []
    for vec in _nullspace(rows, len(monos)):
        terms = {monos[i]: c for i, c in enumerate(vec) if c != 0}
        p = Poly(terms, nz, ns)
        denom_lcm = 1
        for c in p.terms.values():
            denom_lcm = denom_lcm * c.denominator // _gcd(denom_lcm, c.denominator)
        p = p * denom_lcm
        nums = [abs(c.numerator) for c in p.terms.values()]
        g = 0
        for n in nums:
            g = _gcd(g, n)
        if g > 1:
            p = p * Fraction(1, g)
        lead = p.terms_sorted()[0][1]
        if lead < 0:
            p = -p
        basis.append(p)
    return basis


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a
