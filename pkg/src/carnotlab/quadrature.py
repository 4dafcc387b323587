"""Quadrature of gauge-ball and gauge-sphere integrals on the Heisenberg group.

Solid integrals over the gauge ball B_r = {rho < r} are computed in polar
gauge coordinates: a point is delta_t(Phi(theta, phi)) with t in (0, r) and
Phi the unit-sphere chart below.  In these coordinates

    integral_{B_r} h dg
        = int_0^r t^{Q-1} [ iint h(delta_t Phi) * (1/4) dtheta dphi ] dt

with Q = 4 the homogeneous dimension.  The radial direction and theta use
Gauss-Legendre nodes; phi uses the uniform trapezoid rule, which is exact
for trigonometric polynomials of degree below the node count and keeps the
node set invariant under phi -> phi + pi (so splitting an integrand by the
sign of an odd function loses nothing at the nodes).

Gauge powers in the integrand are handled analytically: rho(delta_t Phi) = t,
so a factor rho**p contributes t**p to the radial weight and the angular
factor stays smooth.  When the total radial power t**(alpha-1) has
0 < alpha < 1 the substitution u = t**alpha restores a smooth integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .groups import GroupSpec, heisenberg


class NonintegrableError(ValueError):
    """The radial integrand is too singular at the origin to integrate."""


@lru_cache(maxsize=None)
def _leggauss(n: int):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _gauss_nodes(n: int, a: float, b: float):
    """Gauss-Legendre nodes and weights on (a, b)."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


class SphereChart:
    """Parametrization of the unit gauge sphere {rho = 1} in H^1.

    Phi(theta, phi) = (sqrt(cos theta) cos phi, sqrt(cos theta) sin phi,
    sin(theta) / 4) with theta in (-pi/2, pi/2) and phi in [0, 2pi).  The
    plain chart density (the measure dH / |grad rho| pushed to the chart)
    is the constant 1/4; the horizontal weight w = |grad_H rho|^2 / 4
    equals cos(theta) / 4.
    """

    def __init__(self, spec: GroupSpec):
        if spec.m != 2 or spec.m2 != 1 or not spec.is_heisenberg_type():
            raise ValueError(
                "the gauge sphere chart is implemented for the first "
                "Heisenberg group only"
            )
        self.spec = spec

    def point(self, theta, phi):
        """Chart map; accepts scalars or broadcastable arrays."""
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        radial = np.sqrt(np.cos(theta))
        return radial * np.cos(phi), radial * np.sin(phi), 0.25 * np.sin(theta)

    def plain_density(self, theta):
        """Density of dH / |grad rho| on the chart."""
        return np.full_like(np.asarray(theta, dtype=float), 0.25)

    def horizontal_weight(self, theta):
        """Density |grad_H rho|^2 / 4 on the chart."""
        return 0.25 * np.cos(np.asarray(theta, dtype=float))

    def horizontal_gradient_sq(self, theta):
        """|grad_H rho|^2 composed with the chart."""
        return np.cos(np.asarray(theta, dtype=float))


def sphere_chart(spec: GroupSpec) -> SphereChart:
    return SphereChart(spec)


@dataclass(frozen=True)
class QuadratureConfig:
    """Node counts for the tensor rule.

    phi_order is rounded up to an even count so the node set is invariant
    under the antipodal shift phi -> phi + pi.
    """

    radial_order: int = 64
    theta_order: int = 64
    phi_order: int = 64

    def __post_init__(self):
        for field in ("radial_order", "theta_order", "phi_order"):
            value = getattr(self, field)
            if not isinstance(value, int) or value < 2:
                raise ValueError(f"{field} must be an integer >= 2, got {value!r}")


class QuadratureGrid:
    """Tensor nodes bound to a sphere chart, with chart arrays precomputed."""

    def __init__(self, chart: SphereChart, config: QuadratureConfig | None = None):
        self.chart = chart
        self.config = config or QuadratureConfig()

        theta, wtheta = _gauss_nodes(
            self.config.theta_order, -0.5 * math.pi, 0.5 * math.pi
        )
        n_phi = self.config.phi_order + (self.config.phi_order % 2)
        phi = np.arange(n_phi) * (2.0 * math.pi / n_phi)
        wphi = np.full(n_phi, 2.0 * math.pi / n_phi)

        self.theta = theta
        self.phi = phi
        # unit-sphere chart arrays, shape (n_theta, n_phi)
        x, y, s = chart.point(theta[:, None], phi[None, :])
        self.x = x
        self.y = y
        self.s = s
        self.angular_weight = wtheta[:, None] * wphi[None, :]
        self.plain_density = chart.plain_density(theta)[:, None]
        self.horizontal_weight = chart.horizontal_weight(theta)[:, None]

    @property
    def radial_order(self) -> int:
        return self.config.radial_order

    def angular_sum(self, values: np.ndarray, *, weighted: bool) -> np.ndarray:
        """Sum values over the two angular axes against the chart density."""
        density = self.horizontal_weight if weighted else self.plain_density
        return np.sum(values * (self.angular_weight * density), axis=(-2, -1))


@lru_cache(maxsize=8)
def _cached_grid(config: QuadratureConfig) -> QuadratureGrid:
    return QuadratureGrid(SphereChart(heisenberg(1)), config)


def default_grid(config: QuadratureConfig | None = None) -> QuadratureGrid:
    """A shared grid on the first Heisenberg group."""
    return _cached_grid(config or QuadratureConfig())


def _angular_average(h, t: np.ndarray, grid: QuadratureGrid, *, weighted: bool,
                     absolute: bool = False) -> np.ndarray:
    """A(t) = angular integral of h(delta_t Phi) for each radius in t."""
    t = np.asarray(t, dtype=float)
    x = t[:, None, None] * grid.x[None, :, :]
    y = t[:, None, None] * grid.y[None, :, :]
    s = (t * t)[:, None, None] * grid.s[None, :, :]
    values = np.asarray(h(x, y, s), dtype=float)
    values = np.broadcast_to(values, x.shape)
    if absolute:
        values = np.abs(values)
    return grid.angular_sum(values, weighted=weighted)


def _blowup_guard(h, r: float, grid: QuadratureGrid, alpha: float) -> None:
    # Probe the angular mean of |h| at two radii near the origin; if it grows
    # like t**slope with alpha + slope <= 0 the radial integral diverges.
    probes = np.array([1e-6 * r, 1e-7 * r])
    with np.errstate(over="raise", divide="raise"):
        try:
            a = _angular_average(h, probes, grid, weighted=False, absolute=True)
        except FloatingPointError:
            raise NonintegrableError(
                "integrand overflows near the origin; declare the gauge power "
                "via rho_power"
            ) from None
    if not np.all(np.isfinite(a)):
        raise NonintegrableError(
            "integrand is not finite near the origin; declare the gauge power "
            "via rho_power"
        )
    if a[0] < 1e-300 or a[1] < 1e-300:
        return
    slope = math.log(a[1] / a[0]) / math.log(probes[1] / probes[0])
    if alpha + slope <= 1e-9:
        raise NonintegrableError(
            f"radial integrand behaves like t**({alpha + slope - 1:.3g}) near "
            "the origin and is not integrable"
        )


def ball_integral(h, r: float, grid: QuadratureGrid | None = None, *,
                  rho_power: float = 0.0) -> float:
    """Integrate h * rho**rho_power over the gauge ball of radius r.

    h is a callable taking coordinate arrays (x, y, s) and returning a
    broadcastable array; it must stay bounded on the ball.  The gauge factor
    is folded into the radial weight analytically, so integrable negative
    powers (rho_power > -Q) are computed at full accuracy rather than by
    sampling a singular integrand.
    """
    if r <= 0:
        raise ValueError(f"ball radius must be positive, got {r}")
    grid = grid or default_grid()
    q_hom = grid.chart.spec.Q
    alpha = q_hom + rho_power
    if alpha <= 0:
        raise NonintegrableError(
            f"rho**{rho_power} is not integrable over the ball "
            f"(needs rho_power > -{q_hom})"
        )
    _blowup_guard(h, r, grid, alpha)

    n = grid.radial_order
    if alpha >= 1.0 and float(alpha).is_integer():
        # polynomial radial weight: Gauss-Legendre is exact for poly data
        t, wt = _gauss_nodes(n, 0.0, r)
        radial_weight = wt * t ** (alpha - 1.0)
    else:
        # u = t**alpha turns t**(alpha-1) dt into du / alpha, which removes
        # the fractional-power kink at t = 0 whenever the angular average
        # is slowly varying
        u, wu = _gauss_nodes(n, 0.0, r**alpha)
        t = u ** (1.0 / alpha)
        radial_weight = wu / alpha
    averages = _angular_average(h, t, grid, weighted=False)
    return float(np.dot(radial_weight, averages))


def surface_integral(h, r: float, grid: QuadratureGrid | None = None, *,
                     weighted: bool = True) -> float:
    """Integrate h over the gauge sphere of radius r.

    weighted=True integrates against the horizontal surface density
    |grad_H rho|^2 / 4 (the weight produced by differentiating ball
    integrals in r); weighted=False uses the plain density 1/4, i.e. the
    measure dH / |grad rho|.
    """
    if r <= 0:
        raise ValueError(f"sphere radius must be positive, got {r}")
    grid = grid or default_grid()
    q_hom = grid.chart.spec.Q
    x = r * grid.x
    y = r * grid.y
    s = (r * r) * grid.s
    values = np.asarray(h(x, y, s), dtype=float)
    values = np.broadcast_to(values, x.shape)
    return float(r ** (q_hom - 1) * grid.angular_sum(values, weighted=weighted))


@dataclass(frozen=True)
class MCEstimate:
    """A Monte Carlo estimate with its standard error."""

    value: float
    stderr: float
    n_samples: int
    n_accepted: int


def mc_ball_integral(h, n_samples: int, seed: int, *, r: float = 1.0,
                     rho_min: float = 0.0, chunk: int = 1 << 18) -> MCEstimate:
    """Rejection-sampling check value for ball (or annulus) integrals on H^1.

    Samples uniformly from the bounding box |x|, |y| <= r, |s| <= r^2 / 4
    (volume 2 r^4) and keeps points with rho_min < rho < r.  The integrand
    is evaluated only on accepted points, so it may be singular inside the
    rejected core when rho_min > 0.  Used as an independent cross-check of
    the quadrature, never as the primary route.
    """
    if r <= 0:
        raise ValueError(f"ball radius must be positive, got {r}")
    if not 0.0 <= rho_min < r:
        raise ValueError(f"need 0 <= rho_min < r, got rho_min={rho_min}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    rng = np.random.default_rng(seed)
    volume = 2.0 * r**4
    total = 0.0
    total_sq = 0.0
    accepted = 0
    done = 0
    while done < n_samples:
        size = min(chunk, n_samples - done)
        x = rng.uniform(-r, r, size)
        y = rng.uniform(-r, r, size)
        s = rng.uniform(-0.25 * r * r, 0.25 * r * r, size)
        zsq = x * x + y * y
        rho4 = zsq * zsq + 16.0 * s * s
        keep = rho4 < r**4
        if rho_min > 0.0:
            keep &= rho4 > rho_min**4
        values = np.zeros(size)
        values[keep] = h(x[keep], y[keep], s[keep])
        total += float(np.sum(values))
        total_sq += float(np.sum(values * values))
        accepted += int(np.count_nonzero(keep))
        done += size
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0) / max(n_samples - 1, 1)
    return MCEstimate(
        value=volume * mean,
        stderr=volume * math.sqrt(var),
        n_samples=n_samples,
        n_accepted=accepted,
    )
