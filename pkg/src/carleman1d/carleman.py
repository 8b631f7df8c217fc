"""Explicit solution operator for Carleman's equation ``V_a * u = f`` on (0, 1).

For ``0 < a < 1``

    C_a f = Gamma(a) cos(a pi/2)**2 / pi**2
            * [ phi_a**-1 S(phi_a D^(1-a) f) + pi tan(a pi/2) D^(1-a) f ],

and for the logarithmic kernel

    C_0 f = (pi**2 phi_0)**-1 [ S(phi_0 f') + (2 log 2)**-1 int f / phi_0 ],

with ``phi_a(t) = (t (1 - t))**((1-a)/2)``.  The solution is represented as
``u = G / phi_a`` where ``G`` is smooth.

For ``a > 0`` write ``phi_a D^(1-a) f = ((1-t)/t)**b gt(t)`` with ``b = (1-a)/2`` and
``gt(t) = t**(1-a) D^(1-a) f(t) = [f(0) + t int_0^1 f'(t x)(1-x)**(a-1) dx] / Gamma(a)``.
Subtracting ``gt(t)`` inside the Hilbert transform and using the closed form
of ``S(((1-s)/s)**b)`` cancels the endpoint blow-up of the two terms exactly:

    G(t) = Gamma(a) cos**2 / pi**2
           * [ pi / cos(a pi/2) gt(t) + int ((1-s)/s)**b (gt(s) - gt(t)) / (t - s) ds ].

Both integrals are Gauss-Jacobi sums that are exact when ``f`` is a
polynomial, which is how ``f`` enters: through its Chebyshev interpolant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .errors import DataError, DomainError
from .specfun import jacobi_moment, gamma, gauss_jacobi
from .singular_ops import WeightedFunction, kernel_convolution

__all__ = [
    "CarlemanOperator",
    "CarlemanSolution",
    "carleman_apply",
    "carleman_polynomial",
    "chebyshev_points",
    "verify_residual",
    "weight_exponent",
]


def weight_exponent(a: float) -> float:
    """``(1 - a)/2``; the solution behaves like ``dist**(-(1-a)/2)`` at both ends."""
    return 0.5 * (1.0 - a)


def chebyshev_points(degree: int) -> np.ndarray:
    """First-kind Chebyshev points on [0, 1], increasing."""
    k = np.arange(degree + 1)
    x = -np.cos(np.pi * (k + 0.5) / (degree + 1))
    return 0.5 * (1.0 + x)


@lru_cache(maxsize=32)
def _chebyshev_tools(degree: int):
    z = chebyshev_points(degree)
    vander = cheb.chebvander(2.0 * z - 1.0, degree)
    values_to_coef = np.linalg.inv(vander)
    # derivative in t of sum c_n T_n(2 t - 1), as a coefficient map
    dmat = np.zeros((degree + 1, degree + 1))
    for n in range(degree + 1):
        unit = np.zeros(degree + 1)
        unit[n] = 1.0
        d = 2.0 * cheb.chebder(unit)
        dmat[: d.size, n] = d
    for arr in (z, values_to_coef, dmat):
        arr.setflags(write=False)
    return z, values_to_coef, dmat


def _eval_matrix(points, degree):
    return cheb.chebvander(2.0 * np.asarray(points, dtype=float) - 1.0, degree)


class CarlemanOperator:
    """Linear map from samples of ``f`` at Chebyshev points to ``G = phi_a C_a f``.

    ``targets`` are points of ``[0, 1]`` (endpoints included) where ``G`` is
    wanted.  The map is exact whenever ``f`` is a polynomial of degree at most
    ``degree``.
    """

    def __init__(self, a: float, targets, degree: int = 64):
        a = float(a)
        if not 0.0 <= a < 1.0:
            raise DomainError(f"kernel exponent must satisfy 0 <= a < 1, got {a}")
        self.a = a
        self.degree = int(degree)
        self.targets = np.asarray(targets, dtype=float).copy()
        if np.any((self.targets < 0.0) | (self.targets > 1.0)):
            raise DomainError("Carleman targets must lie in [0, 1]")
        self.points, self._to_coef, self._dmat = _chebyshev_tools(self.degree)
        self.matrix = self._build()

    # ------------------------------------------------------------------
    def _deriv_eval(self, pts):
        return _eval_matrix(pts, self.degree) @ self._dmat

    def _gt_coef(self, pts):
        """Coefficient-space rows of ``gt(p) = t**(1-a) D^(1-a) f`` at ``pts``."""
        a = self.a
        inner = gauss_jacobi(self.degree // 2 + 2, 0.0, a - 1.0)
        pts = np.asarray(pts, dtype=float)
        e0 = _eval_matrix(np.zeros(1), self.degree)
        grid = (pts[:, None] * inner.nodes[None, :]).ravel()
        d1 = self._deriv_eval(grid).reshape(pts.size, inner.n, self.degree + 1)
        rows = e0 + pts[:, None] * np.einsum("r,prk->pk", inner.weights, d1)
        return rows / gamma(a)

    def _difference_rule(self, exponents, t):
        """Gauss-Jacobi rule for the difference quotient; adds a node if ``t`` hits one."""
        n = self.degree // 2 + 2
        rule = gauss_jacobi(n, *exponents)
        if np.min(np.abs(t[:, None] - rule.nodes[None, :])) < 1e-10:
            rule = gauss_jacobi(n + 1, *exponents)
        return rule

    def _rows(self, t):
        a = self.a
        if a > 0.0:
            b = weight_exponent(a)
            c = math.cos(0.5 * a * math.pi)
            rule = self._difference_rule((-b, b), t)
            gt_t = self._gt_coef(t)
            gt_y = self._gt_coef(rule.nodes)
            w = rule.weights[None, :] / (t[:, None] - rule.nodes[None, :])
            rows = (math.pi / c - w.sum(axis=1))[:, None] * gt_t + w @ gt_y
            return gamma(a) * c * c / math.pi**2 * rows
        rule = self._difference_rule((0.5, 0.5), t)
        d_t = self._deriv_eval(t)
        d_y = self._deriv_eval(rule.nodes)
        w = rule.weights[None, :] / (t[:, None] - rule.nodes[None, :])
        rows = (math.pi * (t - 0.5) - w.sum(axis=1))[:, None] * d_t + w @ d_y
        mean = gauss_jacobi(self.degree // 2 + 2, -0.5, -0.5)
        avg = mean.weights @ _eval_matrix(mean.nodes, self.degree)
        rows = rows + avg[None, :] / (2.0 * math.log(2.0))
        return rows / math.pi**2

    def _build(self):
        t = self.targets
        out = np.empty((t.size, self.degree + 1))
        # rows are independent; evaluate blockwise to bound memory
        for start in range(0, t.size, 512):
            block = t[start : start + 512]
            out[start : start + 512] = self._rows(block) @ self._to_coef
        out.setflags(write=False)
        return out

    # ------------------------------------------------------------------
    def apply_values(self, f_values) -> np.ndarray:
        """``G`` at the targets from ``f`` sampled at :attr:`points`."""
        return self.matrix @ np.asarray(f_values, dtype=float)

    def apply(self, f: Callable) -> np.ndarray:
        vals = np.asarray(f(self.points), dtype=float) * np.ones(self.points.size)
        if not np.all(np.isfinite(vals)):
            raise DataError("non-finite samples of f")
        return self.apply_values(vals)


@lru_cache(maxsize=16)
def _operator_on_nodes(a: float, n_nodes: int, degree: int) -> CarlemanOperator:
    b = weight_exponent(a)
    nodes = gauss_jacobi(n_nodes, -b, -b).nodes
    return CarlemanOperator(a, nodes, degree)


@dataclass(frozen=True)
class CarlemanSolution:
    """``u = C_a f`` with exponents ``(-(1-a)/2, -(1-a)/2)`` on (0, 1)."""

    a: float
    density: WeightedFunction
    residual_sup: float = math.nan
    degree: int = 64
    source: Callable | None = field(default=None, compare=False, repr=False)

    @property
    def mass(self) -> float:
        return self.density.integral()


def carleman_apply(
    a: float,
    f: Callable,
    n_nodes: int = 256,
    degree: int = 64,
    verify: bool = False,
) -> CarlemanSolution:
    """Apply ``C_a`` to ``f`` and return the weighted solution.

    ``f`` is a vectorised callable on [0, 1] (numpy polynomial objects are
    accepted); its Chebyshev interpolant of the given ``degree`` supplies the
    derivative data.  With ``verify=True`` the residual of ``V_a * u = f`` is
    measured at 50 interior targets.
    """
    a = float(a)
    if not 0.0 <= a < 1.0:
        raise DomainError(f"kernel exponent must satisfy 0 <= a < 1, got {a}")
    op = _operator_on_nodes(a, int(n_nodes), int(degree))
    g = op.apply(f)
    b = weight_exponent(a)
    density = WeightedFunction((0.0, 1.0), (-b, -b), g)
    residual = verify_residual(a, density, f) if verify else math.nan
    return CarlemanSolution(a, density, residual, int(degree), f)


def carleman_polynomial_coefficients(a: float, coefficients: Sequence[float]) -> np.ndarray:
    """Monomial coefficients of ``q = phi_a C_a p`` for ``p = sum coefficients[k] t**k``."""
    coefficients = [float(c) for c in coefficients]
    if not coefficients:
        raise DataError("empty coefficient list")
    if not all(math.isfinite(c) for c in coefficients):
        raise DataError("non-finite polynomial coefficients")
    a = float(a)
    if not 0.0 <= a < 1.0:
        raise DomainError(f"kernel exponent must satisfy 0 <= a < 1, got {a}")
    deg = len(coefficients) - 1
    q = np.zeros(deg + 1)
    if a > 0.0:
        b = weight_exponent(a)
        c = math.cos(0.5 * a * math.pi)
        # moments of ((1-s)/s)**b
        m = [jacobi_moment(j - b, b) for j in range(deg)]
        for k, coef in enumerate(coefficients):
            if coef == 0.0:
                continue
            # Gamma(a) k! / Gamma(k + a) as a product of ratios
            ratio = math.prod((j + 1.0) / (a + j) for j in range(k))
            qk = np.zeros(deg + 1)
            qk[k] = math.pi / c
            for ell in range(k):
                qk[ell] -= m[k - 1 - ell]
            q += coef * ratio * c * c / math.pi**2 * qk
        return q
    # logarithmic kernel: q_k = [k S(phi_0 t^(k-1)) + (2 log 2)^-1 int s^k / phi_0] / pi^2
    mom_phi = [jacobi_moment(j + 0.5, 0.5) for j in range(deg + 1)]
    for k, coef in enumerate(coefficients):
        if coef == 0.0:
            continue
        qk = np.zeros(deg + 1)
        qk[0] += jacobi_moment(k - 0.5, -0.5) / (2.0 * math.log(2.0))
        if k >= 1:
            j = k - 1
            # S(t^j phi_0) = t^j pi (t - 1/2) - sum_l t^l int s^(j-1-l) phi_0
            sj = np.zeros(deg + 1)
            sj[j + 1] += math.pi
            sj[j] -= 0.5 * math.pi
            for ell in range(j):
                sj[ell] -= mom_phi[j - 1 - ell]
            qk += k * sj
        q += coef * qk / math.pi**2
    return q


def carleman_polynomial(a: float, coefficients: Sequence[float], n_nodes: int = 64) -> WeightedFunction:
    """``C_a p = q / phi_a`` for a polynomial ``p`` (monomial coefficients) from closed forms."""
    q = carleman_polynomial_coefficients(a, coefficients)
    b = weight_exponent(a)
    nodes = gauss_jacobi(n_nodes, -b, -b).nodes
    return WeightedFunction((0.0, 1.0), (-b, -b), np.polynomial.polynomial.polyval(nodes, q))


def verify_residual(
    a: float,
    u: WeightedFunction,
    f: Callable,
    targets=None,
    margin: float = 0.02,
    n_targets: int = 50,
) -> float:
    """``sup_t |(V_a * u)(t) - f(t)|`` over interior targets.

    The convolution is integrated independently of the Carleman formula: it
    is split at ``s = t`` and each side uses graded Gauss-Jacobi panels with
    the kernel and weight singularities built into the end rules.
    """
    if targets is None:
        lo, hi = u.interval
        targets = np.linspace(lo + margin * u.length, hi - margin * u.length, n_targets)
    targets = np.asarray(targets, dtype=float)
    conv = kernel_convolution(a, u, targets)
    return float(np.max(np.abs(conv - f(targets))))
