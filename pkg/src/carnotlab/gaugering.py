"""Exact algebra for the Folland-Kaplan gauge on Heisenberg-type groups.

The gauge is rho = (|z|^4 + 16|s|^2)^(1/4).  Writing q = |z|^4 + 16|s|^2,
symbolic computations with rho live in the ring

    Q[z, s][rho] / (rho^4 - q),   with q inverted,

whose elements are  (P_0 + P_1 rho + P_2 rho^2 + P_3 rho^3) / q^n  with
polynomial P_k.  Since rho^4 - q is irreducible over Q(z, s), the powers
{1, rho, rho^2, rho^3} are a free basis and an element is zero iff all four
numerator polynomials vanish; that is the zero test every identity check here
reduces to.

Differentiation uses X_i rho = v_i rho^{-3} with
v_i = |z|^2 z_i - 4 sum_l s_l (B^l z)_i, and the happy fact X_i q = 4 v_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .groups import GroupSpec, Point
from .poly import Poly

from . import fields


class UnsupportedGroupError(ValueError):
    """Raised when an operation needs a Heisenberg-type group and got something else."""


def require_h_type(spec: GroupSpec):
    if not spec.is_heisenberg_type():
        raise UnsupportedGroupError(
            f"group {spec.name or spec} is not of Heisenberg type; the gauge formula does not apply"
        )


class GaugeRing:
    def __init__(self, spec: GroupSpec):
        require_h_type(spec)
        self.spec = spec
        nz, ns = spec.m, spec.m2
        z2 = Poly.zero(nz, ns)
        for i in range(nz):
            zi = Poly.variable(i, nz, ns)
            z2 = z2 + zi * zi
        s2 = Poly.zero(nz, ns)
        for ell in range(ns):
            sl = Poly.variable(nz + ell, nz, ns)
            s2 = s2 + sl * sl
        self.z_sq = z2
        self.q = z2 * z2 + 16 * s2
        # v_i = |z|^2 z_i - 4 sum_l s_l (B^l z)_i;  X_i rho = v_i rho^{-3},  X_i q = 4 v_i
        vs = []
        for i in range(nz):
            v = z2 * Poly.variable(i, nz, ns)
            for ell in range(ns):
                bz = Poly.zero(nz, ns)
                for j in range(nz):
                    bij = spec.B[ell][i][j]
                    if bij != 0:
                        bz = bz + Poly.variable(j, nz, ns) * bij
                v = v - 4 * Poly.variable(nz + ell, nz, ns) * bz
            vs.append(v)
        self.v = vs

    def zero(self) -> "GaugeElem":
        return GaugeElem(self, {}, 0)

    def from_poly(self, p: Poly) -> "GaugeElem":
        return GaugeElem(self, {0: p}, 0)

    def rho_power(self, s: int) -> "GaugeElem":
        res = s % 4
        carry = s // 4  # rho^s = rho^res * q^carry
        one = Poly.constant(1, self.spec.m, self.spec.m2)
        if carry >= 0:
            return GaugeElem(self, {res: one * self.q_power(carry)}, 0)
        return GaugeElem(self, {res: one}, -carry)

    def q_power(self, n: int) -> Poly:
        out = Poly.constant(1, self.spec.m, self.spec.m2)
        for _ in range(n):
            out = out * self.q
        return out

    def grad_rho_sq(self) -> "GaugeElem":
        """|grad_H rho|^2 = sum_i (v_i rho^{-3})^2 = (sum v_i^2) rho^2 / q^2."""
        acc = Poly.zero(self.spec.m, self.spec.m2)
        for v in self.v:
            acc = acc + v * v
        return GaugeElem(self, {2: acc}, 2)


@dataclass
class GaugeElem:
    ring: GaugeRing
    coeffs: dict[int, Poly]
    qpow: int

    def __post_init__(self):
        clean = {}
        for k, p in self.coeffs.items():
            if not 0 <= k <= 3:
                raise ValueError(f"rho exponent {k} outside residue range")
            if not p.is_zero():
                clean[k] = p
        self.coeffs = clean
        if self.qpow < 0:
            raise ValueError("q-denominator power must be nonnegative")

    def _lift(self, extra: int) -> dict[int, Poly]:
        if extra == 0:
            return dict(self.coeffs)
        qn = self.ring.q_power(extra)
        return {k: p * qn for k, p in self.coeffs.items()}

    def __add__(self, other: "GaugeElem") -> "GaugeElem":
        if self.ring is not other.ring and self.ring.spec != other.ring.spec:
            raise ValueError("elements from different gauge rings")
        n = max(self.qpow, other.qpow)
        a = self._lift(n - self.qpow)
        for k, p in other._lift(n - other.qpow).items():
            a[k] = a.get(k, Poly.zero(self.ring.spec.m, self.ring.spec.m2)) + p
        return GaugeElem(self.ring, a, n)

    def __neg__(self) -> "GaugeElem":
        return GaugeElem(self.ring, {k: -p for k, p in self.coeffs.items()}, self.qpow)

    def __sub__(self, other: "GaugeElem") -> "GaugeElem":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            return GaugeElem(self.ring, {k: p * other for k, p in self.coeffs.items()}, self.qpow)
        if not isinstance(other, GaugeElem):
            return NotImplemented
        out: dict[int, Poly] = {}
        for k1, p1 in self.coeffs.items():
            for k2, p2 in other.coeffs.items():
                k = k1 + k2
                res, carry = k % 4, k // 4
                prod = p1 * p2
                if carry:
                    prod = prod * self.ring.q_power(carry)
                out[res] = out.get(res, Poly.zero(self.ring.spec.m, self.ring.spec.m2)) + prod
        return GaugeElem(self.ring, out, self.qpow + other.qpow)

    __rmul__ = __mul__

    def apply_left(self, i: int) -> "GaugeElem":
        """Apply the left-invariant horizontal field X_i.

        X_i(P rho^k / q^n) = [X_i(P) q + (k - 4n) P v_i] rho^k / q^{n+1},
        using X_i rho^k = k v_i rho^k / q and X_i q = 4 v_i.
        """
        ring = self.ring
        xi = fields.left_field(ring.spec, i)
        out = {}
        for k, p in self.coeffs.items():
            out[k] = xi.apply(p) * ring.q + (k - 4 * self.qpow) * p * ring.v[i]
        return GaugeElem(ring, out, self.qpow + 1)

    def laplacian_left(self) -> "GaugeElem":
        acc = self.ring.zero()
        for i in range(self.ring.spec.m):
            acc = acc + self.apply_left(i).apply_left(i)
        return acc

    def is_zero(self) -> bool:
        return not self.coeffs

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = [f"({p})*rho^{k}" for k, p in sorted(self.coeffs.items())]
        return " + ".join(parts) + (f" / q^{self.qpow}" if self.qpow else "")


# gauge evaluation and identity checks


def gauge_fourth_power(spec: GroupSpec, g: Point) -> Fraction:
    require_h_type(spec)
    z4 = sum(v * v for v in g.z) ** 2
    s2 = sum(v * v for v in g.sigma)
    return Fraction(z4) + 16 * Fraction(s2)


def gauge(spec: GroupSpec, g: Point) -> float:
    """rho(g) = (|z|^4 + 16 |s|^2)^(1/4)."""
    return float(gauge_fourth_power(spec, g)) ** 0.25


def verify_gauge(spec: GroupSpec) -> bool:
    """Symbolic check that |grad_H rho|^2 = |z|^2/rho^2 and Lap_H rho^{2-Q} = 0.

    Failure means the gauge normalization is wrong for this group; callers
    should treat that as fatal.
    """
    ring = GaugeRing(spec)
    grad_sq = ring.grad_rho_sq()
    target = ring.from_poly(ring.z_sq) * ring.rho_power(-2)
    if not (grad_sq - target).is_zero():
        return False
    u = ring.rho_power(2 - spec.Q)
    return u.laplacian_left().is_zero()


def radial_power_laplacian_residual(spec: GroupSpec, s: int) -> GaugeElem:
    """Residual of Lap_H rho^s = s (s + Q - 2) rho^{s-2} |grad_H rho|^2."""
    ring = GaugeRing(spec)
    lhs = ring.rho_power(s).laplacian_left()
    rhs = ring.rho_power(s - 2) * ring.grad_rho_sq() * Fraction(s * (s + spec.Q - 2))
    return lhs - rhs


def gauge_pairing_residual(spec: GroupSpec, f: Poly) -> GaugeElem:
    """Residual of the radial/rotational split of <grad_H f, grad_H rho>:

        <grad_H f, grad_H rho> = (Zf / rho) |grad_H rho|^2 + (4 / rho^3) sum_l s_l Theta_l f.

    Heisenberg-type only.  The returned element is zero iff the identity holds.
    """
    ring = GaugeRing(spec)
    nz, ns = spec.m, spec.m2
    lhs_poly = Poly.zero(nz, ns)
    for i in range(nz):
        lhs_poly = lhs_poly + fields.left_field(spec, i).apply(f) * ring.v[i]
    lhs = ring.from_poly(lhs_poly) * ring.rho_power(-3)

    zf = fields.dilation_field(spec).apply(f)
    rot = Poly.zero(nz, ns)
    for ell in range(ns):
        rot = rot + Poly.variable(nz + ell, nz, ns) * fields.theta_field(spec, ell).apply(f)
    rhs = ring.from_poly(zf) * ring.rho_power(-1) * ring.grad_rho_sq() + ring.from_poly(rot * 4) * ring.rho_power(-3)
    return lhs - rhs
