import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from carleman1d.errors import DomainError, SingularityError
from carleman1d.specfun import (
    beta_moment,
    gamma,
    gauss_jacobi,
    gauss_jacobi_log,
    gauss_legendre,
    jacobi_moment,
)


@pytest.mark.parametrize(
    "x, expected",
    [
        (1.0, 1.0),
        (0.5, math.sqrt(math.pi)),
        (5.0, 24.0),
        (1.5, 0.5 * math.sqrt(math.pi)),
    ],
)
def test_gamma_values(x, expected):
    assert gamma(x) == pytest.approx(expected, rel=1e-14)


def test_gamma_reflection_example():
    assert gamma(0.3) * gamma(0.7) == pytest.approx(math.pi / math.sin(0.3 * math.pi), rel=1e-13)


@pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
def test_gamma_rejects_bad_arguments(x):
    with pytest.raises(DomainError):
        gamma(x)


def test_gamma_recurrence_grid():
    for x in np.arange(1, 101) / 10.0:
        assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-12)


def test_gamma_reflection_grid():
    for a in np.arange(1, 20) * 0.05:
        assert gamma(a) * gamma(1.0 - a) == pytest.approx(math.pi / math.sin(math.pi * a), rel=1e-12)


@given(st.floats(min_value=1e-3, max_value=49.0))
def test_gamma_recurrence_property(x):
    assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-12)


@pytest.mark.parametrize(
    "alpha, beta_, t, expected",
    [
        (1.0, 1.0, 1.0, 1.0),
        (0.5, 0.5, 1.0, math.pi),
        (2.0, 3.0, 1.0, 1.0 / 12.0),
    ],
)
def test_beta_moment_values(alpha, beta_, t, expected):
    assert beta_moment(alpha, beta_, t) == pytest.approx(expected, rel=1e-13)


def test_beta_moment_against_adaptive_quadrature():
    # frozen from QUADPACK's algebraic-weight rule on s**(-1/4) (2 - s)**(-1/4)
    oracle, _ = quad(lambda s: 1.0, 0.0, 2.0, weight="alg", wvar=(-0.25, -0.25), epsabs=1e-14, epsrel=1e-14)
    assert oracle == pytest.approx(2.3962804694711846, rel=1e-12)
    assert beta_moment(0.75, 0.75, 2.0) == pytest.approx(oracle, rel=1e-10)


@settings(max_examples=50)
@given(
    st.floats(min_value=0.05, max_value=5.0),
    st.floats(min_value=0.05, max_value=5.0),
    st.floats(min_value=0.1, max_value=4.0),
)
def test_beta_moment_matches_quadrature(alpha, beta_, t):
    oracle, _ = quad(lambda s: 1.0, 0.0, t, weight="alg", wvar=(alpha - 1.0, beta_ - 1.0), epsrel=1e-13)
    assert beta_moment(alpha, beta_, t) == pytest.approx(oracle, rel=1e-10)


@pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (1.0, -0.5, 1.0), (1.0, 1.0, 0.0), (math.nan, 1.0, 1.0)])
def test_beta_moment_rejects_bad_parameters(args):
    with pytest.raises(DomainError):
        beta_moment(*args)


def test_jacobi_moment_is_beta_moment_in_exponent_form():
    assert jacobi_moment(-0.25, 0.5) == pytest.approx(beta_moment(0.75, 1.5), rel=1e-15)
    with pytest.raises(SingularityError):
        jacobi_moment(-1.0, 0.0)


def test_midpoint_rule():
    rule = gauss_jacobi(1, 0.0, 0.0)
    assert rule.nodes[0] == pytest.approx(0.5)
    assert rule.weights[0] == pytest.approx(1.0)


def test_chebyshev_weight_sum_is_pi():
    assert gauss_jacobi(32, -0.5, -0.5).weights.sum() == pytest.approx(math.pi, rel=1e-13)


def test_quarter_weight_sum():
    a = 0.5
    expected = gamma(0.5 * (1.0 + a)) ** 2 / (a * gamma(a))
    assert gauss_jacobi(32, -0.25, -0.25).weights.sum() == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("n", [1, 2, 5, 16, 64])
@pytest.mark.parametrize("exponents", [(0.0, 0.0), (-0.5, -0.5), (-0.25, 0.25), (0.75, -0.9), (1.5, 0.25)])
def test_rule_exactness_and_structure(n, exponents):
    rule = gauss_jacobi(n, *exponents)
    assert np.all(np.diff(rule.nodes) > 0.0)
    assert rule.nodes[0] > 0.0 and rule.nodes[-1] < 1.0
    assert np.all(rule.weights > 0.0)
    bl, br = exponents
    for k in range(2 * n):
        exact = beta_moment(bl + k + 1.0, br + 1.0, 1.0)
        assert rule.integrate(rule.nodes**k) == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("exponents", [(-1.0, 0.0), (0.0, -1.5)])
def test_rule_rejects_non_integrable_weight(exponents):
    with pytest.raises(DomainError):
        gauss_jacobi(4, *exponents)


def test_mapped_rule_integrates_on_new_interval():
    rule = gauss_jacobi(12, 0.5, -0.5).mapped(-1.0, 3.0)
    # int_{-1}^{3} (t+1)^(1/2) (3-t)^(-1/2) t dt via the substitution t = -1 + 4x
    exact = 4.0 * (-beta_moment(1.5, 0.5) + 4.0 * beta_moment(2.5, 0.5))
    assert rule.integrate(rule.nodes) == pytest.approx(exact, rel=1e-13)


def test_log_rule_moments():
    rule = gauss_jacobi_log(16, 0.0)
    for k in range(32):
        assert rule.integrate(rule.nodes**k) == pytest.approx(1.0 / (k + 1.0) ** 2, rel=1e-12)
    rule = gauss_jacobi_log(12, -0.5)
    for k in range(10):
        assert rule.integrate(rule.nodes**k) == pytest.approx(1.0 / (k + 0.5) ** 2, rel=1e-11)


def test_legendre_is_unit_jacobi():
    a, b = gauss_legendre(7), gauss_jacobi(7, 0.0, 0.0)
    np.testing.assert_array_equal(a.nodes, b.nodes)
