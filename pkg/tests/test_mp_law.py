import math

import numpy as np
import pytest
from scipy import integrate

from covtest import QuadratureError, RatioAtUnityError, DomainError
from covtest.mp_law import (helper_integral_cos, mp_density, mp_edges, mp_integral_g,
                            mp_integral_numeric, mp_point_mass, ratio_to_d0)


def x_domain_integral(f, q):
    """Independent oracle: integrate on the x axis with QUADPACK's algebraic
    endpoint weight (x - a)^0.5 (b - x)^0.5, plus the atom at zero."""
    a, b = mp_edges(q)
    val, _ = integrate.quad(lambda x: f(x) / (2 * math.pi * x * q), a, b, weight="alg",
                            wvar=(0.5, 0.5), epsabs=1e-13, epsrel=1e-13)
    return val + f(0.0) * mp_point_mass(q)


def test_density_example():
    assert mp_density(1.25, 0.25) == pytest.approx(1 / (0.625 * math.pi), rel=1e-12)
    assert mp_density(1.25, 0.25) == pytest.approx(0.50930, abs=1e-5)


def test_density_outside_support_is_zero():
    a, b = mp_edges(0.25)
    np.testing.assert_array_equal(mp_density(np.array([a - 1e-3, b + 1e-3, -1.0, 10.0]), 0.25), 0)


def test_point_mass():
    assert mp_point_mass(2.0) == 0.5
    assert mp_point_mass(0.5) == 0.0
    assert mp_point_mass(1.0) == 0.0


@pytest.mark.parametrize("q", [0.5, 2.0, 3.3, 0.05])
def test_integral_g_closed_form(q):
    assert mp_integral_g(q) == q


@pytest.mark.parametrize("q", [1.0, 1.0 + 5e-9, 1.0 - 1e-9])
def test_integral_g_excludes_unity(q):
    with pytest.raises(RatioAtUnityError):
        mp_integral_g(q)


def test_integral_g_continuous_across_unity():
    assert abs(mp_integral_g(1 - 1e-4) - 1) < 2e-4
    assert abs(mp_integral_g(1 + 1e-4) - 1) < 2e-4


def test_numeric_examples():
    assert mp_integral_numeric(lambda x: (x - 1) ** 2, 0.5, 1e-9) == pytest.approx(0.5, abs=1e-8)
    assert mp_integral_numeric(lambda x: x, 0.5) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("q", [0.05, 0.3, 0.5, 0.9, 1.0, 1.2, 2.0, 3.9])
def test_numeric_normalization(q):
    assert mp_integral_numeric(lambda x: np.ones_like(x), q) == pytest.approx(1.0, abs=1e-8)
    # scalar-only callables work too
    assert mp_integral_numeric(lambda x: 1.0, q) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("q", [0.2, 0.7, 1.6, 3.0])
def test_numeric_against_x_domain_oracle(q):
    for f in (lambda x: x, lambda x: x**2, lambda x: np.exp(-x), lambda x: (x - 1) ** 2):
        assert mp_integral_numeric(f, q) == pytest.approx(x_domain_integral(f, q), abs=1e-9)


@pytest.mark.parametrize("q", [0.25, 0.5, 2.0])
def test_moments(q):
    # MP moments: E x = 1, E x^2 = 1 + q
    assert mp_integral_numeric(lambda x: x, q) == pytest.approx(1.0, abs=1e-9)
    assert mp_integral_numeric(lambda x: x**2, q) == pytest.approx(1.0 + q, abs=1e-9)


def test_numeric_random_ratios_match_closed_form():
    qs = np.random.default_rng(7).uniform(0, 4, size=50)
    for q in qs:
        if abs(q - 1) < 1e-8:
            continue
        assert abs(mp_integral_numeric(lambda x: (x - 1) ** 2, q, 1e-9) - mp_integral_g(q)) < 1e-7


def test_numeric_nonconvergence_raises():
    with pytest.raises(QuadratureError):
        mp_integral_numeric(lambda x: np.sign(x - 1.0), 0.5, tol=1e-15, max_halvings=3)


def test_helper_integral_cos_example():
    assert helper_integral_cos(-1.25) == pytest.approx(-8 * math.pi / 3, rel=1e-14)
    assert helper_integral_cos(-1.25) == pytest.approx(-8.37758, abs=1e-5)


def test_helper_integral_cos_against_quadrature():
    for d0 in np.random.default_rng(3).uniform(-10, -1.05, size=20):
        direct, _ = integrate.quad(lambda t: 1 / (math.cos(t) + d0), 0, 2 * math.pi,
                                   epsabs=1e-13, epsrel=1e-13, limit=200)
        assert abs(helper_integral_cos(d0) - direct) < 1e-8


def test_helper_integral_cos_domain():
    with pytest.raises(DomainError):
        helper_integral_cos(ratio_to_d0(1.0))
    with pytest.raises(DomainError):
        helper_integral_cos(0.3)
    assert -1e-3 < helper_integral_cos(-1e4) < 0


def test_theta_substitution_third_part():
    # -1/(2 sqrt q) times the integral of sin^2/(cos + d0) equals pi/(2q) (1 + q - |1 - q|)
    for q in (0.3, 2.5):
        d0 = ratio_to_d0(q)
        val, _ = integrate.quad(lambda t: -math.sin(t) ** 2 / (2 * math.sqrt(q) * (math.cos(t) + d0)),
                                0, 2 * math.pi, epsabs=1e-13)
        assert val == pytest.approx(math.pi / (2 * q) * (1 + q - abs(1 - q)), rel=1e-10)
