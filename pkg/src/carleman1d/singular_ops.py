"""Weighted functions and the singular integral operators acting on them.

A :class:`WeightedFunction` on ``[lo, hi]`` is
``u(t) = (t - lo)**bl * (hi - t)**br * g(t)`` with ``g`` smooth; ``g`` is
stored through its values on the Gauss-Jacobi nodes of the weight, and is
evaluated elsewhere by barycentric interpolation.

Operators on the unit interval:

* ``S f(t) = p.v. int_0^1 f(s) / (t - s) ds`` (finite Hilbert transform),
* ``I^a f(t) = Gamma(a)**-1 int_0^t f(s) (t - s)**(a-1) ds``,
* ``D^a f = d/dt I^(1-a) f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, SingularityError, UnsupportedWeightError
from .specfun import (
    QuadratureRule,
    jacobi_moment,
    gamma,
    gauss_jacobi,
    gauss_jacobi_log,
    gauss_legendre,
)

__all__ = [
    "WeightedFunction",
    "airfoil_solve",
    "barycentric_eval",
    "finite_hilbert",
    "fractional_derivative",
    "fractional_integral",
    "graded_rule",
    "hilbert_of_weight",
    "hilbert_regular_part",
    "kernel_convolution",
    "smooth_convolution",
]


# --------------------------------------------------------------------------
# Barycentric interpolation


def barycentric_eval(x_nodes, lam, values, x, chunk: int = 2048) -> np.ndarray:
    """Evaluate the barycentric interpolant through ``(x_nodes, values)``."""
    x = np.asarray(x, dtype=float)
    shape = x.shape
    flat = x.ravel()
    out = np.empty_like(flat)
    for start in range(0, flat.size, chunk):
        xx = flat[start : start + chunk]
        diff = xx[:, None] - x_nodes[None, :]
        exact = diff == 0.0
        diff[exact] = 1.0
        kern = lam[None, :] / diff
        res = (kern @ values) / kern.sum(axis=1)
        hit_rows, hit_cols = np.nonzero(exact)
        res[hit_rows] = values[hit_cols]
        out[start : start + chunk] = res
    return out.reshape(shape)


# --------------------------------------------------------------------------
# Weighted functions


@dataclass(frozen=True)
class WeightedFunction:
    """``u(t) = (t - lo)**bl (hi - t)**br g(t)`` on ``interval = (lo, hi)``."""

    interval: tuple[float, float]
    exponents: tuple[float, float]
    values: np.ndarray

    def __post_init__(self):
        lo, hi = (float(v) for v in self.interval)
        if not lo < hi:
            raise DomainError(f"empty interval {self.interval}")
        bl, br = (float(e) for e in self.exponents)
        if bl <= -1.0 or br <= -1.0:
            raise SingularityError(f"non-integrable weight exponents ({bl}, {br})")
        object.__setattr__(self, "interval", (lo, hi))
        object.__setattr__(self, "exponents", (bl, br))
        vals = np.asarray(self.values, dtype=float).copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    # construction -------------------------------------------------------
    @classmethod
    def from_function(cls, fn: Callable, interval=(0.0, 1.0), exponents=(0.0, 0.0), n: int = 64):
        """Sample the smooth factor ``fn`` on the Gauss-Jacobi nodes."""
        rule = gauss_jacobi(n, *exponents).mapped(*interval)
        return cls(interval, exponents, np.asarray(fn(rule.nodes), dtype=float) * np.ones(n))

    # basic properties ---------------------------------------------------
    @property
    def n(self) -> int:
        return self.values.size

    @property
    def length(self) -> float:
        return self.interval[1] - self.interval[0]

    @property
    def unit_rule(self) -> QuadratureRule:
        return gauss_jacobi(self.n, *self.exponents)

    @property
    def rule(self) -> QuadratureRule:
        return self.unit_rule.mapped(*self.interval)

    @property
    def nodes(self) -> np.ndarray:
        return self.rule.nodes

    def to_unit(self, t):
        return (np.asarray(t, dtype=float) - self.interval[0]) / self.length

    def weight(self, t) -> np.ndarray:
        lo, hi = self.interval
        t = np.asarray(t, dtype=float)
        bl, br = self.exponents
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(
                (t > lo) & (t < hi),
                np.abs(t - lo) ** bl * np.abs(hi - t) ** br,
                0.0,
            )

    def smooth(self, t) -> np.ndarray:
        """Barycentric evaluation of the smooth factor ``g``."""
        rule = self.unit_rule
        return barycentric_eval(rule.nodes, rule.barycentric_weights, self.values, self.to_unit(t))

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.weight(t) * self.smooth(t)

    def integral(self) -> float:
        return self.rule.integrate(self.values)

    def moment(self, fn: Callable) -> float:
        """``int u(t) fn(t) dt`` with the function's own Gauss rule."""
        rule = self.rule
        return float(np.dot(rule.weights, self.values * fn(rule.nodes)))

    # algebra --------------------------------------------------------------
    def scaled(self, factor: float) -> "WeightedFunction":
        return WeightedFunction(self.interval, self.exponents, factor * self.values)

    def combine(self, other: "WeightedFunction", alpha: float = 1.0, beta: float = 1.0) -> "WeightedFunction":
        """``alpha * self + beta * other`` for functions of the same shape and size."""
        if other.interval != self.interval or other.exponents != self.exponents or other.n != self.n:
            raise DomainError("combine requires identical interval, exponents and size")
        return WeightedFunction(self.interval, self.exponents, alpha * self.values + beta * other.values)

    def resampled(self, n: int) -> "WeightedFunction":
        rule = gauss_jacobi(n, *self.exponents).mapped(*self.interval)
        return WeightedFunction(self.interval, self.exponents, self.smooth(rule.nodes))

    def reweighted(self, exponents, n: int | None = None) -> "WeightedFunction":
        """Re-express ``u`` with new endpoint exponents.

        Valid when the exponent change is an integer at each endpoint, so the
        new smooth factor ``g * (t-lo)**(bl-bl') * (hi-t)**(br-br')`` remains
        smooth; negative integer changes require ``g`` to vanish there.
        """
        n = self.n if n is None else n
        new = tuple(float(e) for e in exponents)
        lo, hi = self.interval
        rule = gauss_jacobi(n, *new).mapped(lo, hi)
        x = rule.nodes
        dl = self.exponents[0] - new[0]
        dr = self.exponents[1] - new[1]
        vals = self.smooth(x) * (x - lo) ** dl * (hi - x) ** dr
        return WeightedFunction(self.interval, new, vals)

    # distribution function ----------------------------------------------
    def cdf(self, t, n_rule: int = 48) -> np.ndarray:
        """``F(t) = int_lo^t u`` normalised by nothing (the raw integral)."""
        shape = np.shape(t)
        t = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
        lo, hi = self.interval
        length = self.length
        bl, br = self.exponents
        total = self.integral()
        out = np.empty_like(t)
        out[t <= lo] = 0.0
        out[t >= hi] = total
        inner = (t > lo) & (t < hi)
        left = inner & (t <= lo + 0.5 * length)
        right = inner & ~left
        if np.any(left):
            rl = gauss_jacobi(n_rule, bl, 0.0)
            d = t[left] - lo
            s = lo + d[:, None] * rl.nodes[None, :]
            integrand = (hi - s) ** br * self.smooth(s)
            out[left] = d ** (1.0 + bl) * (integrand @ rl.weights)
        if np.any(right):
            rr = gauss_jacobi(n_rule, 0.0, br)
            d = hi - t[right]
            s = hi - d[:, None] * (1.0 - rr.nodes[None, :])
            integrand = (s - lo) ** bl * self.smooth(s)
            out[right] = total - d ** (1.0 + br) * (integrand @ rr.weights)
        return out.reshape(shape)


# --------------------------------------------------------------------------
# Graded quadrature for endpoint and near-endpoint singularities


def _endpoint_weight(dist, sing):
    e, log_power = sing
    w = dist**e if e != 0.0 else np.ones_like(dist)
    if log_power:
        w = w * (-np.log(dist))
    return w


def _singular_piece(length, sing, n):
    """Nodes (distance from anchor) and weights on ``[0, length]`` for ``dist**e (-log dist)**l``."""
    e, log_power = sing
    if log_power:
        rj = gauss_jacobi(n, e, 0.0)
        rl = gauss_jacobi_log(n, e)
        scale = length ** (1.0 + e)
        nodes = np.concatenate([length * rj.nodes, length * rl.nodes])
        weights = np.concatenate([-math.log(length) * scale * rj.weights, scale * rl.weights])
        return nodes, weights
    rj = gauss_jacobi(n, e, 0.0)
    return length * rj.nodes, length ** (1.0 + e) * rj.weights


def _half_rule(half, sing, gap, n, growth):
    """Graded rule in 'distance from anchor' coordinates on ``[0, half]``."""
    leg = gauss_legendre(n)
    if gap >= 0.5 * half:
        return _singular_piece(half, sing, n)
    gap = max(gap, 1e-13 * half)
    nodes, weights = [], []
    x, w = _singular_piece(gap, sing, n)
    nodes.append(x)
    weights.append(w)
    a = gap
    while a < half:
        b = min(a * growth, half)
        if half - b < 0.5 * (b - a):
            b = half
        x = a + (b - a) * leg.nodes
        nodes.append(x)
        weights.append((b - a) * leg.weights * _endpoint_weight(x, sing))
        a = b
    return np.concatenate(nodes), np.concatenate(weights)


def graded_rule(
    lo: float,
    hi: float,
    left=(0.0, 0),
    right=(0.0, 0),
    left_gap: float = math.inf,
    right_gap: float = math.inf,
    n: int = 20,
    growth: float = 4.0,
):
    """Nodes and weights for ``int_lo^hi wl(s - lo) wr(hi - s) F(s) ds``.

    ``left`` and ``right`` are ``(exponent, log_power)`` pairs describing the
    endpoint weights ``d**e * (-log d)**log_power``.  ``left_gap`` and
    ``right_gap`` are distances from the endpoints to the nearest singularity
    of ``F`` beyond them; the mesh is refined geometrically so that no panel
    is much longer than its distance to such a point.
    """
    if not hi > lo:
        raise DomainError(f"empty interval ({lo}, {hi})")
    half = 0.5 * (hi - lo)
    dl, wl = _half_rule(half, left, left_gap, n, growth)
    dr, wr = _half_rule(half, right, right_gap, n, growth)
    s_left = lo + dl
    s_right = hi - dr
    wl = wl * _endpoint_weight(hi - s_left, right)
    wr = wr * _endpoint_weight(s_right - lo, left)
    return np.concatenate([s_left, s_right]), np.concatenate([wl, wr])


def _kernel_weight(a: float):
    return (0.0, 1) if a == 0.0 else (-a, 0)


def _kernel_value(a: float, r):
    r = np.abs(r)
    return -np.log(r) if a == 0.0 else r ** (-a)


def _convolution_point(a, u: WeightedFunction, t, n, smooth_fn):
    lo, hi = u.interval
    bl, br = u.exponents
    kw = _kernel_weight(a)
    if lo < t < hi:
        s1, w1 = graded_rule(lo, t, (bl, 0), kw, right_gap=hi - t, n=n)
        s2, w2 = graded_rule(t, hi, kw, (br, 0), left_gap=t - lo, n=n)
        f1 = (hi - s1) ** br * smooth_fn(s1)
        f2 = (s2 - lo) ** bl * smooth_fn(s2)
        return float(np.dot(w1, f1) + np.dot(w2, f2))
    if t == hi:
        s, w = graded_rule(lo, hi, (bl, 0), (br + kw[0], kw[1]), n=n)
        return float(np.dot(w, smooth_fn(s)))
    if t == lo:
        s, w = graded_rule(lo, hi, (bl + kw[0], kw[1]), (br, 0), n=n)
        return float(np.dot(w, smooth_fn(s)))
    if t > hi:
        s, w = graded_rule(lo, hi, (bl, 0), (br, 0), right_gap=t - hi, n=n)
    else:
        s, w = graded_rule(lo, hi, (bl, 0), (br, 0), left_gap=lo - t, n=n)
    return float(np.dot(w, smooth_fn(s) * _kernel_value(a, t - s)))


def kernel_convolution(a: float, u: WeightedFunction, t, n: int = 20) -> np.ndarray:
    """``(V_a * u)(t) = int V_a(t - s) u(s) ds`` for any real ``t``.

    Splits at ``s = t`` and integrates each side with a graded Gauss rule
    whose end panels carry the exact Jacobi (or logarithmic) weight.
    """
    if not 0.0 <= a < 1.0:
        raise DomainError(f"kernel exponent must satisfy 0 <= a < 1, got {a}")
    shape = np.shape(t)
    t = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    return np.array([_convolution_point(a, u, ti, n, u.smooth) for ti in t]).reshape(shape)


def smooth_convolution(kernel_fn: Callable, u: WeightedFunction, t) -> np.ndarray:
    """``int K(t - s) u(s) ds`` for a smooth kernel using ``u``'s Gauss rule."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    rule = u.rule
    return kernel_fn(t[:, None] - rule.nodes[None, :]) @ (rule.weights * u.values)


# --------------------------------------------------------------------------
# Finite Hilbert transform


def _hilbert_base(beta_right: float, t: np.ndarray) -> np.ndarray:
    """``S(s**(-b) (1 - s)**b)(t)`` for ``|b| < 1``.

    Inside ``(0, 1)`` this is the principal value; outside it is the ordinary
    (Cauchy) integral ``pi / sin(pi b) (1 - ((t - 1)/t)**b)``.
    """
    b = beta_right
    inside = (t > 0.0) & (t < 1.0)
    ratio = np.abs((1.0 - t) / t)
    if b == 0.0:
        return np.log(1.0 / ratio)
    damp = np.where(inside, math.cos(math.pi * b), 1.0)
    return math.pi / math.sin(math.pi * b) * (1.0 - damp * ratio**b)


def hilbert_of_weight(beta_left: float, beta_right: float, t) -> np.ndarray:
    """Closed form of ``S(t**bl (1 - t)**br)`` on ``(0, 1)``.

    Available when ``bl + br`` is an integer (both exponents above ``-1``);
    the weight is reduced to the exponent-sum-zero family with the shift
    rules ``S(t f) = t S f - int f`` and ``S((1-t) f) = (1-t) S f + int f``.
    Points outside ``[0, 1]`` give the ordinary integral.
    """
    bl, br = float(beta_left), float(beta_right)
    if bl <= -1.0 or br <= -1.0:
        raise SingularityError(f"non-integrable weight exponents ({bl}, {br})")
    m = bl + br
    if abs(m - round(m)) > 1e-12:
        raise UnsupportedWeightError(f"no closed form for exponents ({bl}, {br})")
    t = np.asarray(t, dtype=float)
    if np.any((t == 0.0) | (t == 1.0)):
        raise DomainError("hilbert_of_weight is undefined at the endpoints")
    m = int(round(m))
    if m == 0:
        return _hilbert_base(br, t)
    if m > 0:
        if br >= bl:
            return (1.0 - t) * hilbert_of_weight(bl, br - 1.0, t) + jacobi_moment(bl, br - 1.0)
        return t * hilbert_of_weight(bl - 1.0, br, t) - jacobi_moment(bl - 1.0, br)
    if bl <= br:
        return (hilbert_of_weight(bl + 1.0, br, t) + jacobi_moment(bl, br)) / t
    return (hilbert_of_weight(bl, br + 1.0, t) - jacobi_moment(bl, br)) / (1.0 - t)


def _regular_part_unit(rule: QuadratureRule, values: np.ndarray, smooth_fn, tau: np.ndarray, g_tau: np.ndarray):
    """``int w(s) (g(s) - g(tau)) / (tau - s) ds`` on the unit interval."""
    diff = tau[:, None] - rule.nodes[None, :]
    close = np.min(np.abs(diff), axis=1) < 1e-8
    out = np.empty_like(tau)
    far = ~close
    if np.any(far):
        d = diff[far]
        out[far] = ((values[None, :] - g_tau[far, None]) / d) @ rule.weights
    if np.any(close):
        alt = gauss_jacobi(rule.n + 1, *rule.exponents)
        g_alt = smooth_fn(alt.nodes)
        d = tau[close, None] - alt.nodes[None, :]
        out[close] = ((g_alt[None, :] - g_tau[close, None]) / d) @ alt.weights
    return out


def hilbert_regular_part(u: WeightedFunction, t) -> np.ndarray:
    """``p.v. int w(s) (g(s) - g(t)) / (t - s) ds`` on ``u``'s interval."""
    shape = np.shape(t)
    t = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    tau = u.to_unit(t)
    rule = u.unit_rule
    unit_smooth = lambda x: u.smooth(u.interval[0] + u.length * x)  # noqa: E731
    g_tau = unit_smooth(tau)
    scale = u.length ** (u.exponents[0] + u.exponents[1])
    return (scale * _regular_part_unit(rule, u.values, unit_smooth, tau, g_tau)).reshape(shape)


def finite_hilbert(u: WeightedFunction, t) -> np.ndarray:
    """``S u(t) = p.v. int u(s) / (t - s) ds`` for ``t`` inside ``u``'s interval.

    Singularity subtraction: ``S(w g) = g(t) S w + int w (g(s) - g(t))/(t - s)``
    with the closed form for ``S w``.
    """
    shape = np.shape(t)
    t = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    tau = u.to_unit(t)
    if np.any((tau <= 0.0) | (tau >= 1.0)):
        raise DomainError("finite_hilbert evaluates strictly inside the interval")
    scale = u.length ** (u.exponents[0] + u.exponents[1])
    sw = hilbert_of_weight(*u.exponents, tau)
    return (scale * sw * u.smooth(t) + hilbert_regular_part(u, t)).reshape(shape)


# --------------------------------------------------------------------------
# Riemann-Liouville calculus


def fractional_integral(a: float, f, t, n: int = 48, left_exponent: float = 0.0) -> np.ndarray:
    """``I^a f(t)`` for ``0 < a < 1``.

    ``f`` is either a callable or a sampled pair ``(grid, values)``.  For a
    callable, ``f(s)`` may behave like ``s**(-left_exponent)`` near zero and
    the integral uses the Gauss-Jacobi rule for
    ``x**(-left_exponent) (1 - x)**(a-1)``.  Sampled data use product
    integration of the piecewise-linear interpolant with exact kernel moments.
    """
    if not 0.0 < a < 1.0:
        raise DomainError(f"fractional order must satisfy 0 < a < 1, got {a}")
    shape = np.shape(t)
    t = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    if np.any(t <= 0.0):
        raise DomainError("fractional integrals need t > 0")
    if isinstance(f, tuple):
        return _product_integral(a, *f, t).reshape(shape)
    rule = gauss_jacobi(n, -left_exponent, a - 1.0)
    s = t[:, None] * rule.nodes[None, :]
    with np.errstate(invalid="ignore"):
        smooth = rule.nodes[None, :] ** left_exponent * f(s)
    return ((smooth @ rule.weights) * t**a / gamma(a)).reshape(shape)


def _product_integral(a, grid, values, t):
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.shape != values.shape or np.any(np.diff(grid) <= 0.0) or grid[0] != 0.0:
        raise DomainError("sampled data need an increasing grid starting at 0")
    out = np.zeros_like(t)
    for i, ti in enumerate(t):
        k = np.searchsorted(grid, ti, side="right")
        edges = np.append(grid[:k], ti) if ti > grid[k - 1] else grid[:k]
        fv = np.interp(edges, grid, values)
        s0, s1 = edges[:-1], edges[1:]
        f0, f1 = fv[:-1], fv[1:]
        slope = (f1 - f0) / (s1 - s0)
        u0, u1 = ti - s0, ti - s1
        # f(s) = f0 + slope (s - s0) = (f0 + slope u0) - slope u with u = t - s
        A = f0 + slope * u0
        out[i] = np.sum(A * (u0**a - u1**a) / a - slope * (u0 ** (a + 1.0) - u1 ** (a + 1.0)) / (a + 1.0))
    return out / gamma(a)


def fractional_derivative(
    a: float, f: Callable, t, df: Callable | None = None, start: float = 0.0, n: int = 48
) -> np.ndarray:
    """``D^a f(t)`` with base point ``start``, in the Caputo-style form

    ``f(start) (t - start)**-a / Gamma(1-a) + Gamma(1-a)**-1 int_start^t f'(s) (t - s)**-a ds``.

    ``df`` is the derivative of ``f``; numpy polynomial objects supply their
    own derivative when ``df`` is omitted.
    """
    if not 0.0 <= a < 1.0:
        raise DomainError(f"fractional order must satisfy 0 <= a < 1, got {a}")
    shape = np.shape(t)
    t = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    if np.any(t <= start):
        raise DomainError("fractional derivative needs t > start")
    if a == 0.0:
        return np.asarray(f(t), dtype=float).reshape(shape)
    if df is None:
        if not hasattr(f, "deriv"):
            raise DomainError("fractional_derivative needs derivative data for f")
        df = f.deriv()
    rule = gauss_jacobi(n, 0.0, -a)
    d = t - start
    s = start + d[:, None] * rule.nodes[None, :]
    hat = float(f(np.array(start))) + d * (df(s) @ rule.weights)
    return (hat * d ** (-a) / gamma(1.0 - a)).reshape(shape)


# --------------------------------------------------------------------------
# Airfoil equation


def airfoil_solve(a: float, f: Callable, n: int = 64) -> WeightedFunction:
    """Solve ``pi tan(a pi/2) u - S u = f`` on (0, 1) for ``0 < a < 1``.

    The solution is ``u = (t/(1-t))**b (cos/pi) [f + (cos/pi) R]`` with
    ``b = (1-a)/2``, ``cos = cos(a pi/2)`` and ``R`` the regular part of
    ``S(((1-s)/s)**b f)``; it is returned as a weighted function with
    exponents ``(b, -b)``.
    """
    if not 0.0 < a < 1.0:
        raise DomainError(f"airfoil solution requires 0 < a < 1, got {a}")
    b = 0.5 * (1.0 - a)
    c = math.cos(0.5 * a * math.pi)
    source = WeightedFunction.from_function(f, (0.0, 1.0), (-b, b), n)
    rule = gauss_jacobi(n, b, -b)
    x = rule.nodes
    reg = hilbert_regular_part(source, x)
    g = (c / math.pi) * (f(x) + (c / math.pi) * reg)
    return WeightedFunction((0.0, 1.0), (b, -b), g)
