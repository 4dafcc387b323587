import math

import numpy as np
import pytest

import carnotlab as cl
from carnotlab.numeval import (
    gauge_numeric,
    horizontal_gauge_gradient_sq_numeric,
    poly_evaluator,
)
from carnotlab.poly import parse_poly
from carnotlab.quadrature import (
    NonintegrableError,
    QuadratureConfig,
    QuadratureGrid,
    ball_integral,
    default_grid,
    mc_ball_integral,
    sphere_chart,
    surface_integral,
)

H1 = cl.heisenberg(1)
PI = math.pi


def const_one(x, y, s):
    return np.ones_like(x)


def grid_with(radial=64, theta=64, phi=64):
    return QuadratureGrid(sphere_chart(H1), QuadratureConfig(radial, theta, phi))


# chart geometry


def test_chart_lands_on_unit_gauge_sphere():
    chart = sphere_chart(H1)
    rng = np.random.default_rng(42)
    theta = rng.uniform(-PI / 2, PI / 2, size=500)
    phi = rng.uniform(0, 2 * PI, size=500)
    x, y, s = chart.point(theta, phi)
    rho = gauge_numeric([x, y], [s])
    assert np.max(np.abs(rho - 1.0)) < 1e-13


def test_chart_gradient_weight_is_cos_theta():
    chart = sphere_chart(H1)
    rng = np.random.default_rng(7)
    theta = rng.uniform(-PI / 2, PI / 2, size=200)
    phi = rng.uniform(0, 2 * PI, size=200)
    x, y, s = chart.point(theta, phi)
    gradsq = horizontal_gauge_gradient_sq_numeric([x, y], [s])
    assert np.max(np.abs(gradsq - np.cos(theta))) < 1e-13
    assert np.max(np.abs(chart.horizontal_gradient_sq(theta) - np.cos(theta))) == 0.0


def test_chart_only_for_h1():
    with pytest.raises(ValueError):
        sphere_chart(cl.heisenberg(2))


# frozen closed-form integrals


def test_unit_ball_volume():
    assert ball_integral(const_one, 1.0) == pytest.approx(PI**2 / 8, rel=1e-13)


def test_weighted_sphere_measure():
    # angular integral of the horizontal kernel over the unit sphere
    assert surface_integral(const_one, 1.0, weighted=True) == pytest.approx(
        PI, rel=1e-13
    )


def test_plain_sphere_measure():
    assert surface_integral(const_one, 1.0, weighted=False) == pytest.approx(
        PI**2 / 2, rel=1e-13
    )


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_second_moment_closed_form(r):
    val = ball_integral(lambda x, y, s: x * x, r)
    assert val == pytest.approx(PI * r**6 / 12, rel=1e-13)


def test_angular_moment_table():
    # moments of the weighted sphere measure used by the closed-form
    # functional values elsewhere in the suite
    cases = [
        (lambda x, y, s: x * x, PI**2 / 8),
        (lambda x, y, s: y * y, PI**2 / 8),
        (lambda x, y, s: x**4, PI / 4),
        (lambda x, y, s: y**4, PI / 4),
        (lambda x, y, s: x * x * y * y, PI / 12),
        (lambda x, y, s: s * s, PI / 48),
        (lambda x, y, s: x * y * s, 0.0),
        (lambda x, y, s: x**6, 15 * PI**2 / 256),
    ]
    for h, expected in cases:
        got = surface_integral(h, 1.0, weighted=True)
        assert got == pytest.approx(expected, rel=1e-12, abs=1e-13)


def test_plain_moment_table():
    cases = [
        (const_one, PI**2 / 2),
        (lambda x, y, s: x * x, PI / 2),
        (lambda x, y, s: y * y, PI / 2),
        (lambda x, y, s: 6 * s * s * (x * x + y * y), PI / 8),
    ]
    for h, expected in cases:
        got = surface_integral(h, 1.0, weighted=False)
        assert got == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("kappa,h", [
    (1, lambda x, y, s: x),
    (2, lambda x, y, s: x * y),
    (2, lambda x, y, s: s),
    (3, lambda x, y, s: x * s),
])
def test_odd_integrands_vanish(kappa, h):
    assert abs(ball_integral(h, 1.0)) < 1e-14
    assert abs(surface_integral(h, 1.0, weighted=True)) < 1e-14


def test_ball_scaling_homogeneity():
    # kappa-homogeneous h scales as r^(Q + kappa)
    h = lambda x, y, s: x * x * y * y
    base = ball_integral(h, 1.0)
    for r in (0.3, 1.7):
        assert ball_integral(h, r) == pytest.approx(base * r**8, rel=1e-12)


def test_surface_scaling_homogeneity():
    h = lambda x, y, s: x * x
    base = surface_integral(h, 1.0, weighted=True)
    r = 1.5
    assert surface_integral(h, r, weighted=True) == pytest.approx(
        base * r**5, rel=1e-12
    )


def test_normalized_surface_derivative_anchor():
    # d/dr [ r^(1-Q) * weighted surface integral of |z|^2 ] = pi^2 r / 2
    h = lambda x, y, s: x * x + y * y
    def normalized(r):
        return r ** (1 - H1.Q) * surface_integral(h, r, weighted=True)
    r, dr = 0.8, 1e-5
    deriv = (normalized(r + dr) - normalized(r - dr)) / (2 * dr)
    assert deriv == pytest.approx(PI**2 * r / 2, rel=1e-8)
    assert normalized(r) == pytest.approx(PI**2 * r**2 / 4, rel=1e-12)


# radial weight handling


def test_negative_rho_power_exact():
    # alpha = Q - 3.5 = 0.5 goes through the substitution branch
    assert ball_integral(const_one, 1.0, rho_power=-3.5) == pytest.approx(
        PI**2, rel=1e-12
    )


def test_rho_power_scaling():
    val = ball_integral(const_one, 2.0, rho_power=-2.0)
    # alpha = 2: integral = (pi^2/2) * r^2 / 2
    assert val == pytest.approx(PI**2, rel=1e-12)


def test_nonintegrable_power_rejected():
    with pytest.raises(NonintegrableError):
        ball_integral(const_one, 1.0, rho_power=-4.0)
    with pytest.raises(NonintegrableError):
        ball_integral(const_one, 1.0, rho_power=-5.0)


def test_blowup_guard_catches_undeclared_singularity():
    h = lambda x, y, s: 1.0 / gauge_numeric([x, y], [s]) ** 4
    with pytest.raises(ValueError, match="behaves like"):
        ball_integral(h, 1.0)


def test_declared_singularity_passes_guard():
    h = lambda x, y, s: gauge_numeric([x, y], [s]) ** -2.0
    val = ball_integral(h, 1.0, rho_power=0.0)
    # same as declaring rho_power=-2 with h = 1
    assert val == pytest.approx(PI**2 / 4, rel=1e-10)


def test_invalid_radius_rejected():
    with pytest.raises(ValueError):
        ball_integral(const_one, 0.0)
    with pytest.raises(ValueError):
        ball_integral(const_one, -1.0)
    with pytest.raises(ValueError):
        surface_integral(const_one, 0.0)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(radial_order=1)
    with pytest.raises(ValueError):
        QuadratureConfig(theta_order=0)


def test_phi_count_rounds_up_to_even():
    g = grid_with(16, 16, 7)
    assert g.x.shape == (16, 8)


def test_default_grid_is_cached():
    assert default_grid() is default_grid()
    cfg = QuadratureConfig(32, 32, 32)
    assert default_grid(cfg) is default_grid(cfg)


def test_doubling_orders_agree():
    h = lambda x, y, s: np.exp(-x * x - y * y - s * s)
    a = ball_integral(h, 1.0, grid_with(64, 64, 64))
    b = ball_integral(h, 1.0, grid_with(128, 128, 128))
    assert abs(a - b) < 1e-12


def test_polynomial_evaluator_matches_exact(paper_f):
    ev = poly_evaluator(paper_f)
    pts = np.array([[0.5, -0.25, 0.125], [1.0, 2.0, -0.5]])
    got = ev([pts[:, 0], pts[:, 1], pts[:, 2]])
    for k in range(2):
        exact = paper_f.eval_exact([float(v) for v in pts[k]])
        assert got[k] == pytest.approx(float(exact), rel=1e-14)


# Monte Carlo cross-checks


def test_mc_volume_within_three_sigma():
    for seed in (0, 1, 2):
        est = mc_ball_integral(const_one, 200_000, seed)
        assert abs(est.value - PI**2 / 8) <= 3 * est.stderr
        assert est.n_accepted < est.n_samples
    # acceptance fraction approximates |B_1| / (2 r^4)
    frac = est.n_accepted / est.n_samples
    assert frac == pytest.approx(PI**2 / 16, abs=0.01)


def test_mc_annulus_volume():
    est = mc_ball_integral(const_one, 200_000, 0, rho_min=0.5)
    expected = (PI**2 / 8) * (1 - 0.5**4)
    assert abs(est.value - expected) <= 3 * est.stderr


def test_mc_second_moment():
    est = mc_ball_integral(lambda x, y, s: x * x, 200_000, 5)
    assert abs(est.value - PI / 12) <= 3 * est.stderr


def test_mc_deterministic():
    a = mc_ball_integral(const_one, 50_000, 123)
    b = mc_ball_integral(const_one, 50_000, 123)
    assert a.value == b.value
    assert a.n_accepted == b.n_accepted


def test_mc_validation():
    with pytest.raises(ValueError):
        mc_ball_integral(const_one, 1000, 0, rho_min=1.5)
    with pytest.raises(ValueError):
        mc_ball_integral(const_one, 0, 0)


def test_mc_matches_quadrature_on_smooth_function():
    h = lambda x, y, s: np.exp(x) * np.cos(y) + s * s
    quad = ball_integral(h, 1.0)
    est = mc_ball_integral(h, 400_000, 11)
    assert abs(est.value - quad) <= 3 * est.stderr
