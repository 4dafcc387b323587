from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

import carnotlab as cl
from carnotlab.poly import Poly, monomials_of_weighted_degree

# property tests run exact rational arithmetic; wall-clock deadlines only
# produce flaky failures there
settings.register_profile(
    "exact", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("exact")


@pytest.fixture(scope="session")
def h1():
    return cl.heisenberg(1)


@pytest.fixture(scope="session")
def h2():
    return cl.heisenberg(2)


@pytest.fixture(scope="session")
def free3():
    return cl.free_step_two(3)


@pytest.fixture(scope="session")
def grid():
    return cl.default_grid()


@pytest.fixture(scope="session")
def paper_f(h1):
    return cl.resolve_poly("paper-f", h1)


@pytest.fixture(scope="session")
def paper_fmia(h1):
    return cl.resolve_poly("paper-fmia", h1)


@pytest.fixture(scope="session")
def p1(h1):
    return cl.resolve_poly("p1", h1)


@pytest.fixture(scope="session")
def p3(h1):
    return cl.resolve_poly("p3", h1)


def small_fractions(max_den: int = 12, bound: int = 5):
    return st.fractions(
        min_value=-bound, max_value=bound, max_denominator=max_den
    )


def points_on(spec):
    width = spec.m + spec.m2
    return st.lists(small_fractions(), min_size=width, max_size=width).map(
        lambda coords: cl.point(spec, coords)
    )


def polys_on(spec, max_weight: int = 4, coeff_bound: int = 4):
    """Random exact polynomials up to the given weighted degree."""
    monos = [
        exps
        for kappa in range(max_weight + 1)
        for exps in monomials_of_weighted_degree(spec.m, spec.m2, kappa)
    ]
    coeff = st.integers(min_value=-coeff_bound, max_value=coeff_bound)
    return st.lists(coeff, min_size=len(monos), max_size=len(monos)).map(
        lambda cs: Poly(
            {e: Fraction(c) for e, c in zip(monos, cs) if c != 0},
            spec.m,
            spec.m2,
        )
    )
