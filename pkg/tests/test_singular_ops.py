import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from carleman1d.errors import DomainError, SingularityError, UnsupportedWeightError
from carleman1d.singular_ops import (
    WeightedFunction,
    airfoil_solve,
    finite_hilbert,
    fractional_derivative,
    fractional_integral,
    hilbert_of_weight,
    kernel_convolution,
    smooth_convolution,
)
from carleman1d.specfun import gamma, gauss_jacobi, jacobi_moment


def smooth_g(t):
    return np.exp(t) * np.cos(2.0 * t)


def hilbert_oracle(exponents, g, t):
    """QUADPACK: Cauchy weight on a middle panel, algebraic weight on the ends."""
    bl, br = exponents
    lo, hi = 0.5 * t, 0.5 * (1.0 + t)
    w = lambda s: s**bl * (1.0 - s) ** br  # noqa: E731
    left, _ = quad(lambda s: (1.0 - s) ** br * g(s) / (t - s), 0.0, lo, weight="alg", wvar=(bl, 0.0), epsabs=1e-14)
    right, _ = quad(lambda s: s**bl * g(s) / (t - s), hi, 1.0, weight="alg", wvar=(0.0, br), epsabs=1e-14)
    mid, _ = quad(lambda s: w(s) * g(s), lo, hi, weight="cauchy", wvar=t, epsabs=1e-14)
    return left + right - mid


# ---------------------------------------------------------------- closed forms


@pytest.mark.parametrize("t", [0.1, 0.37, 0.5, 0.93])
def test_hilbert_of_phi0(t):
    assert float(hilbert_of_weight(0.5, 0.5, t)) == pytest.approx(math.pi * (t - 0.5), abs=1e-13)
    u = WeightedFunction((0.0, 1.0), (0.5, 0.5), np.ones(16))
    assert float(finite_hilbert(u, t)) == pytest.approx(math.pi * (t - 0.5), abs=1e-13)


@pytest.mark.parametrize("t", [0.1, 0.5, 0.8])
def test_hilbert_of_inverse_phi0_vanishes(t):
    assert abs(float(hilbert_of_weight(-0.5, -0.5, t))) <= 1e-13


@pytest.mark.parametrize("t", [0.2, 0.5, 0.7])
def test_hilbert_of_sqrt_ratio_is_pi(t):
    assert float(hilbert_of_weight(-0.5, 0.5, t)) == pytest.approx(math.pi, rel=1e-14)


@pytest.mark.parametrize("a", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("t", [0.05, 0.5, 0.9])
def test_hilbert_of_ratio_weight(a, t):
    b = 0.5 * (1.0 - a)
    c = math.pi / math.cos(0.5 * a * math.pi)
    ratio = ((1.0 - t) / t) ** b
    expected = c * (1.0 - ratio * math.sin(0.5 * a * math.pi))
    assert float(hilbert_of_weight(-b, b, t)) == pytest.approx(expected, rel=1e-13)
    u = WeightedFunction((0.0, 1.0), (-b, b), np.ones(24))
    assert float(finite_hilbert(u, t)) == pytest.approx(expected, rel=1e-12)


def test_ratio_weight_example_value():
    a = 0.5
    expected = math.pi / math.cos(math.pi / 4.0) * (1.0 - math.sin(math.pi / 4.0))
    u = WeightedFunction.from_function(lambda s: np.ones_like(s), (0.0, 1.0), (-0.25, 0.25), 20)
    assert float(finite_hilbert(u, 0.5)) == pytest.approx(expected, rel=1e-13)


def test_legendre_weight_midpoint_vanishes():
    u = WeightedFunction((0.0, 1.0), (0.0, 0.0), np.ones(8))
    assert abs(float(finite_hilbert(u, 0.5))) <= 1e-14
    t = 0.3
    assert float(finite_hilbert(u, t)) == pytest.approx(math.log(t / (1.0 - t)), rel=1e-13)


@pytest.mark.parametrize("a", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("t0", [0.3, 0.6])
def test_two_branch_identity(a, t0):
    pts = np.concatenate([np.linspace(0.05, t0 - 0.05, 7), np.linspace(t0 + 0.05, 0.99, 7)])
    for t in pts:
        value = float(hilbert_of_weight(a - 1.0, -a, t / t0)) / t0
        base = 1.0 / (t ** (1.0 - a) * abs(t0 - t) ** a)
        factor = math.pi / math.tan(a * math.pi) if t < t0 else math.pi / math.sin(a * math.pi)
        assert value == pytest.approx(base * factor, rel=1e-6)


@pytest.mark.parametrize("pair", [(-0.25, -0.25), (0.3, 0.1)])
def test_unreachable_weight_pairs_raise(pair):
    with pytest.raises(UnsupportedWeightError):
        hilbert_of_weight(*pair, 0.5)


def test_hilbert_of_weight_rejects_endpoints_and_bad_exponents():
    with pytest.raises(DomainError):
        hilbert_of_weight(0.5, 0.5, 0.0)
    with pytest.raises(SingularityError):
        hilbert_of_weight(-1.0, 1.0, 0.5)


# ---------------------------------------------------------------- quadrature layer


@pytest.mark.parametrize(
    "exponents", [(0.0, 0.0), (0.5, 0.5), (-0.5, -0.5), (-0.25, 0.25), (0.25, -0.25), (-0.375, 1.375), (1.5, 0.5)]
)
@pytest.mark.parametrize("t", [0.03, 0.31, 0.5, 0.77, 0.98])
def test_finite_hilbert_against_quadpack(exponents, t):
    u = WeightedFunction.from_function(smooth_g, (0.0, 1.0), exponents, 40)
    assert float(finite_hilbert(u, t)) == pytest.approx(hilbert_oracle(exponents, smooth_g, t), rel=1e-9, abs=1e-10)


def test_finite_hilbert_on_general_interval():
    u = WeightedFunction.from_function(smooth_g, (-1.0, 2.0), (-0.25, 0.25), 40)
    t = 0.4
    # substitution s = -1 + 3x maps the transform back to the unit interval
    g_unit = lambda x: smooth_g(-1.0 + 3.0 * x)  # noqa: E731
    expected = hilbert_oracle((-0.25, 0.25), g_unit, (t + 1.0) / 3.0)
    assert float(finite_hilbert(u, t)) == pytest.approx(expected, rel=1e-10)


def test_finite_hilbert_at_a_node_uses_requadrature():
    u = WeightedFunction.from_function(smooth_g, (0.0, 1.0), (-0.25, 0.25), 24)
    node = float(u.nodes[11])
    expected = hilbert_oracle((-0.25, 0.25), smooth_g, node)
    assert float(finite_hilbert(u, node)) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("t", [0.0, 1.0, -0.2, 1.5])
def test_finite_hilbert_rejects_non_interior(t):
    u = WeightedFunction((0.0, 1.0), (0.0, 0.0), np.ones(4))
    with pytest.raises(DomainError):
        finite_hilbert(u, t)


# ---------------------------------------------------------------- operator properties


@pytest.mark.parametrize("p, q", [(np.exp, np.cos), (lambda s: 1.0 + s**3, lambda s: np.sin(3.0 * s))])
def test_anti_self_adjoint(p, q):
    rule = gauss_jacobi(60, 0.5, 0.5)
    x = rule.nodes
    f_phi = WeightedFunction.from_function(p, (0.0, 1.0), (0.5, 0.5), 60)
    g_phi = WeightedFunction.from_function(q, (0.0, 1.0), (0.5, 0.5), 60)
    fsg = np.dot(rule.weights, p(x) * finite_hilbert(g_phi, x))
    gsf = np.dot(rule.weights, q(x) * finite_hilbert(f_phi, x))
    assert abs(fsg + gsf) <= 1e-8
    # one factor inside 1/phi_0, the other inside phi_0
    inv = gauss_jacobi(60, -0.5, -0.5)
    g_inv = WeightedFunction.from_function(q, (0.0, 1.0), (-0.5, -0.5), 60)
    lhs = np.dot(rule.weights, p(x) * finite_hilbert(g_inv, x))
    rhs = np.dot(inv.weights, q(inv.nodes) * finite_hilbert(f_phi, inv.nodes))
    assert abs(lhs + rhs) <= 1e-8


@pytest.mark.parametrize("exponents", [(-0.25, 0.25), (0.5, 0.5), (-0.5, -0.5), (0.0, 0.0)])
def test_shift_rule(exponents):
    n = 40
    u = WeightedFunction.from_function(smooth_g, (0.0, 1.0), exponents, n)
    tu = WeightedFunction.from_function(lambda s: s * smooth_g(s), (0.0, 1.0), exponents, n)
    t = np.linspace(0.05, 0.95, 19)
    lhs = finite_hilbert(tu, t) - t * finite_hilbert(u, t) + u.integral()
    assert np.max(np.abs(lhs)) <= 1e-8


def test_integer_shift_reduction_matches_quadpack():
    for pair in [(0.75, 0.25), (-0.25, 1.25), (1.5, -0.5)]:
        for t in [0.2, 0.6]:
            expected = hilbert_oracle(pair, lambda s: 1.0, t)
            assert float(hilbert_of_weight(*pair, t)) == pytest.approx(expected, rel=1e-10)
    assert jacobi_moment(0.5, 0.5) == pytest.approx(math.pi / 8.0)


@pytest.mark.parametrize("a", [0.25, 0.5])
@pytest.mark.parametrize("f", [lambda s: np.ones_like(s), lambda s: 1.0 - 2.0 * s + 3.0 * s**2, lambda s: s**4])
def test_airfoil_equation(a, f):
    u = airfoil_solve(a, f, n=48)
    t = np.linspace(0.04, 0.96, 24)
    residual = math.pi * math.tan(0.5 * a * math.pi) * u(t) - finite_hilbert(u, t) - f(t)
    assert np.max(np.abs(residual)) <= 1e-6


# ---------------------------------------------------------------- fractional calculus


def test_fractional_integral_examples():
    one = lambda s: np.ones_like(s)  # noqa: E731
    assert float(fractional_integral(0.5, one, 1.0)) == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-14)
    assert float(fractional_integral(0.5, lambda s: s, 1.0)) == pytest.approx(gamma(2.0) / gamma(2.5), rel=1e-14)
    assert float(fractional_integral(0.5, np.zeros_like, 1.0)) == 0.0


def test_fractional_integral_of_t_against_brute_force():
    oracle, _ = quad(lambda s: s, 0.0, 1.0, weight="alg", wvar=(0.0, -0.5))
    assert float(fractional_integral(0.5, lambda s: s, 1.0)) == pytest.approx(oracle / gamma(0.5), rel=1e-12)


def test_fractional_integral_product_integration():
    grid = np.linspace(0.0, 2.0, 81)
    t = np.array([0.3, 1.0, 2.0])
    # piecewise-linear data are integrated exactly
    exact_lin = 1.5 * t**0.3 / gamma(1.3) + 2.0 * t**1.3 / gamma(2.3)
    np.testing.assert_allclose(fractional_integral(0.3, (grid, 1.5 + 2.0 * grid), t), exact_lin, rtol=1e-13)
    fine = np.linspace(0.0, 2.0, 4001)
    exact_sq = 2.0 * t**2.3 / gamma(3.3)
    np.testing.assert_allclose(fractional_integral(0.3, (fine, fine**2), t), exact_sq, rtol=1e-6)


def test_fractional_integral_domain():
    with pytest.raises(DomainError):
        fractional_integral(0.5, np.ones_like, 0.0)
    with pytest.raises(DomainError):
        fractional_integral(1.0, np.ones_like, 0.5)


def test_fractional_derivative_examples():
    lin = np.polynomial.Polynomial([0.0, 1.0])
    assert float(fractional_derivative(0.5, lin, 1.0)) == pytest.approx(1.0 / gamma(1.5), rel=1e-14)
    const = np.polynomial.Polynomial([3.0])
    t = np.array([0.25, 1.0, 4.0])
    np.testing.assert_allclose(fractional_derivative(0.5, const, t), 3.0 * t**-0.5 / gamma(0.5), rtol=1e-14)
    sq = np.polynomial.Polynomial([0.0, 0.0, 1.0])
    assert float(fractional_derivative(0.3, sq, 0.7)) == pytest.approx(2.0 / gamma(2.7) * 0.7**1.7, rel=1e-13)


def test_fractional_derivative_against_brute_force():
    # D^a f = d/dt I^(1-a) f: centred difference of the mpmath fractional integral
    a, t, h = 0.4, 0.8, 1e-4
    f = lambda s: mpmath.exp(s) * mpmath.sin(2 * s)  # noqa: E731
    with mpmath.workdps(30):
        ia = lambda x: mpmath.quad(lambda s: f(s) * (x - s) ** (-a), [0, x]) / mpmath.gamma(1 - a)  # noqa: E731
        oracle = float((ia(t + h) - ia(t - h)) / (2 * h))
    fn = lambda s: np.exp(s) * np.sin(2.0 * s)  # noqa: E731
    dfn = lambda s: np.exp(s) * (np.sin(2.0 * s) + 2.0 * np.cos(2.0 * s))  # noqa: E731
    assert float(fractional_derivative(a, fn, t, df=dfn)) == pytest.approx(oracle, rel=1e-7)


def test_fractional_derivative_with_start_point():
    # f(t) = (t - 1)**2 from the base point 1 behaves like s**2 from 0
    f = np.polynomial.Polynomial([1.0, -2.0, 1.0])
    t = 1.6
    assert float(fractional_derivative(0.3, f, t, start=1.0)) == pytest.approx(2.0 / gamma(2.7) * 0.6**1.7, rel=1e-13)
    with pytest.raises(DomainError):
        fractional_derivative(0.3, f, 1.0, start=1.0)
    with pytest.raises(DomainError):
        fractional_derivative(0.3, lambda s: s, 0.5)


def _derivative_callable(a, f, df):
    def g(s):
        s = np.asarray(s, dtype=float)
        return fractional_derivative(a, f, s.ravel(), df=df).reshape(s.shape)

    return g


INVERSION_CASES = [
    (np.polynomial.Polynomial([1.0]), None),
    (np.polynomial.Polynomial([0.5, -1.0, 2.0]), None),
    (np.polynomial.Polynomial([1.0, 2.0, -3.0, 0.5, 1.5, -2.0]), None),
    (np.sin, np.cos),
    (np.exp, np.exp),
]


@pytest.mark.parametrize("a", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("f, df", INVERSION_CASES)
def test_inversion_integral_of_derivative(a, f, df):
    t = gauss_jacobi(16, 0.0, 0.0).nodes
    dfa = _derivative_callable(a, f, df)
    recovered = fractional_integral(a, dfa, t, left_exponent=a)
    assert np.max(np.abs(recovered - f(t))) <= 1e-8


# ---------------------------------------------------------------- weighted functions and convolutions


def test_weighted_function_interpolation_and_integral():
    unit = WeightedFunction.from_function(smooth_g, (0.0, 1.0), (-0.25, 0.5), 32)
    np.testing.assert_array_equal(unit.smooth(unit.nodes), unit.values)
    u = WeightedFunction.from_function(smooth_g, (1.0, 3.0), (-0.25, 0.5), 32)
    np.testing.assert_allclose(u.smooth(u.nodes), u.values, rtol=1e-14)
    t = np.linspace(1.05, 2.95, 11)
    np.testing.assert_allclose(u.smooth(t), smooth_g(t), rtol=1e-12)
    exact, _ = quad(smooth_g, 1.0, 3.0, weight="alg", wvar=(-0.25, 0.5), epsabs=1e-14)
    assert u.integral() == pytest.approx(exact, rel=1e-13)
    assert float(u.cdf(3.0)) == pytest.approx(exact, rel=1e-13) and float(u.cdf(0.0)) == 0.0
    for x in (1.7, 2.6):
        part, _ = quad(lambda s: (3.0 - s) ** 0.5 * smooth_g(s), 1.0, x, weight="alg", wvar=(-0.25, 0.0), epsabs=1e-14)
        assert float(u.cdf(x)) == pytest.approx(part, rel=1e-11)


def test_weighted_function_reweighting():
    u = WeightedFunction.from_function(smooth_g, (0.0, 1.0), (0.5, 0.5), 32)
    v = u.reweighted((-0.5, -0.5))
    t = np.linspace(0.1, 0.9, 9)
    np.testing.assert_allclose(v(t), u(t), rtol=1e-12)


def test_weighted_function_rejects_bad_data():
    with pytest.raises(SingularityError):
        WeightedFunction((0.0, 1.0), (-1.0, 0.0), np.ones(3))
    with pytest.raises(DomainError):
        WeightedFunction((1.0, 1.0), (0.0, 0.0), np.ones(3))


def _convolution_oracle(a, exponents, g, t):
    """QUADPACK with the kernel and density singularities as algebraic (or log) weights."""
    bl, br = exponents
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    if not 0.0 < t < 1.0:
        kern = (lambda r: -np.log(abs(r))) if a == 0.0 else (lambda r: abs(r) ** (-a))
        if t in (0.0, 1.0):
            if a == 0.0:
                kind = "alg-loga" if t == 0.0 else "alg-logb"
                return -quad(g, 0.0, 1.0, weight=kind, wvar=(bl, br), **opts)[0]
            wv = (bl - a, br) if t == 0.0 else (bl, br - a)
            return quad(g, 0.0, 1.0, weight="alg", wvar=wv, **opts)[0]
        return quad(lambda s: kern(t - s) * g(s), 0.0, 1.0, weight="alg", wvar=(bl, br), **opts)[0]
    left_f = lambda s: (1.0 - s) ** br * g(s)  # noqa: E731
    right_f = lambda s: s**bl * g(s)  # noqa: E731
    if a == 0.0:
        left = -quad(left_f, 0.0, t, weight="alg-logb", wvar=(bl, 0.0), **opts)[0]
        right = -quad(right_f, t, 1.0, weight="alg-loga", wvar=(0.0, br), **opts)[0]
    else:
        left = quad(left_f, 0.0, t, weight="alg", wvar=(bl, -a), **opts)[0]
        right = quad(right_f, t, 1.0, weight="alg", wvar=(-a, br), **opts)[0]
    return left + right


@pytest.mark.parametrize("a", [0.0, 0.3, 0.75])
@pytest.mark.parametrize("exponents", [(-0.5, -0.5), (-0.35, 0.65), (0.0, 0.0)])
@pytest.mark.parametrize("t", [0.001, 0.4, 0.999, 1.3, -0.25])
def test_kernel_convolution_against_quadpack(a, exponents, t):
    u = WeightedFunction.from_function(np.cos, (0.0, 1.0), exponents, 24)
    expected = _convolution_oracle(a, exponents, np.cos, t)
    assert float(kernel_convolution(a, u, t)) == pytest.approx(expected, rel=1e-9, abs=1e-11)


@pytest.mark.parametrize("a", [0.0, 0.5])
@pytest.mark.parametrize("t", [0.0, 1.0])
def test_kernel_convolution_at_endpoints(a, t):
    u = WeightedFunction.from_function(np.exp, (0.0, 1.0), (-0.25, -0.25), 24)
    expected = _convolution_oracle(a, (-0.25, -0.25), np.exp, t)
    assert float(kernel_convolution(a, u, t)) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("a", [0.3, 0.75, 0.9])
@pytest.mark.parametrize("t", [0.001, 0.4, 0.999])
def test_kernel_convolution_of_constant_closed_form(a, t):
    u = WeightedFunction((0.0, 1.0), (0.0, 0.0), np.ones(8))
    exact = (t ** (1.0 - a) + (1.0 - t) ** (1.0 - a)) / (1.0 - a)
    assert float(kernel_convolution(a, u, t)) == pytest.approx(exact, rel=1e-13)


def test_smooth_convolution():
    u = WeightedFunction.from_function(np.ones_like, (0.0, 1.0), (0.0, 0.0), 16)
    out = smooth_convolution(lambda r: r**2, u, np.array([0.0, 2.0]))
    np.testing.assert_allclose(out, [1.0 / 3.0, 4.0 - 2.0 + 1.0 / 3.0], rtol=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.02, max_value=0.98))
def test_hilbert_of_affine_weighted_is_linear(t):
    # S(phi_0 (alpha + beta s)) = alpha S(phi_0) + beta S(s phi_0) and both are polynomials
    u = WeightedFunction.from_function(lambda s: 2.0 - 3.0 * s, (0.0, 1.0), (0.5, 0.5), 8)
    expected = 2.0 * math.pi * (t - 0.5) - 3.0 * (t * math.pi * (t - 0.5) - math.pi / 8.0)
    assert float(finite_hilbert(u, t)) == pytest.approx(expected, abs=1e-12)
