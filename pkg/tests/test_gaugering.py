from fractions import Fraction

import pytest
from hypothesis import given, settings

import carnotlab as cl
from carnotlab.fields import horizontal_laplacian, left_field
from carnotlab.gaugering import (
    GaugeRing,
    UnsupportedGroupError,
    gauge,
    gauge_fourth_power,
    gauge_pairing_residual,
    radial_power_laplacian_residual,
    require_h_type,
    verify_gauge,
)
from carnotlab.poly import parse_poly

from conftest import points_on, polys_on, small_fractions

H1 = cl.heisenberg(1)
H2 = cl.heisenberg(2)
FREE3 = cl.free_step_two(3)


def test_h_type_gate():
    require_h_type(H1)
    require_h_type(H2)
    with pytest.raises(UnsupportedGroupError):
        require_h_type(FREE3)
    with pytest.raises(UnsupportedGroupError):
        GaugeRing(FREE3)
    with pytest.raises(UnsupportedGroupError):
        gauge(FREE3, cl.identity(FREE3))


@pytest.mark.parametrize("spec", [H1, H2], ids=lambda s: s.name)
def test_verify_gauge(spec):
    # symbolic check of Lap rho = (Q-1) |grad rho|^2 / rho and the closed
    # form |grad rho|^2 = |z|^2 / rho^2
    assert verify_gauge(spec)


def test_gauge_fourth_power_values():
    assert gauge_fourth_power(H1, cl.point(H1, [1, 0, 0])) == 1
    assert gauge_fourth_power(H1, cl.point(H1, [0, 0, Fraction(1, 4)])) == 1
    assert gauge_fourth_power(H1, cl.point(H1, [1, 2, 3])) == 169
    assert gauge(H1, cl.point(H1, [1, 2, 3])) == pytest.approx(169 ** 0.25, rel=1e-15)
    assert gauge(H1, cl.identity(H1)) == 0.0


@given(points_on(H2), small_fractions(max_den=8, bound=4))
def test_gauge_homogeneity_exact(g, lam):
    scaled = cl.dilate(H2, lam, g)
    assert gauge_fourth_power(H2, scaled) == lam**4 * gauge_fourth_power(H2, g)


@given(points_on(H1))
def test_gauge_symmetric_under_inversion(g):
    assert gauge_fourth_power(H1, cl.inverse(H1, g)) == gauge_fourth_power(H1, g)


def test_ring_rho_power_algebra():
    ring = GaugeRing(H1)
    r1 = ring.rho_power(1)
    assert (r1 * r1 - ring.rho_power(2)).is_zero()
    assert (ring.rho_power(4) - ring.from_poly(ring.q)).is_zero()
    assert (ring.rho_power(3) * ring.rho_power(-3) - ring.rho_power(0)).is_zero()
    assert (ring.grad_rho_sq() * ring.rho_power(2) - ring.from_poly(ring.z_sq)).is_zero()


def test_ring_lift_commutes_with_calculus():
    ring = GaugeRing(H1)
    p = parse_poly("x^2*y + s^2 - 3*x", H1)
    lifted = ring.from_poly(p)
    assert (lifted.laplacian_left() - ring.from_poly(horizontal_laplacian(H1, p))).is_zero()
    for i in range(2):
        lhs = lifted.apply_left(i)
        rhs = ring.from_poly(left_field(H1, i).apply(p))
        assert (lhs - rhs).is_zero()


@pytest.mark.parametrize("s", [2, 3, 7, -1, -5])
def test_radial_power_laplacian_identity(s):
    # Lap rho^s = s (s + Q - 2) rho^(s-2) |grad rho|^2, verified in the ring
    assert radial_power_laplacian_residual(H1, s).is_zero()


@pytest.mark.parametrize("s", [2, 5, -2])
def test_radial_power_laplacian_identity_h2(s):
    assert radial_power_laplacian_residual(H2, s).is_zero()


def test_gauge_pairing_on_coordinates():
    # sum_i (X_i f) v_i = |z|^2 Z f + 4 sum_l sigma_l Theta_l f
    for text in ("x", "y", "s", "x*s", "x + 6*y*s - x^3"):
        assert gauge_pairing_residual(H1, parse_poly(text, H1)).is_zero()


@given(polys_on(H1, max_weight=4))
@settings(max_examples=40)
def test_gauge_pairing_random_h1(p):
    assert gauge_pairing_residual(H1, p).is_zero()


@given(polys_on(H2, max_weight=3, coeff_bound=2))
@settings(max_examples=15)
def test_gauge_pairing_random_h2(p):
    assert gauge_pairing_residual(H2, p).is_zero()


def test_gauge_vector_matches_gradient_of_quarter_q():
    # X_i q = 4 v_i where q = rho^4
    ring = GaugeRing(H1)
    for i in range(2):
        lhs = left_field(H1, i).apply(ring.q)
        assert lhs == ring.v[i] * parse_poly("4", H1)
