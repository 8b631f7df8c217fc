"""Special functions and Gauss rules on the unit interval.

Every rule in this module integrates over ``(0, 1)``.  Rules for other
intervals are obtained with :meth:`QuadratureRule.mapped`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.special

from .errors import DomainError, SingularityError

__all__ = [
    "QuadratureRule",
    "beta",
    "jacobi_moment",
    "beta_moment",
    "gamma",
    "gauss_jacobi",
    "gauss_jacobi_log",
    "gauss_legendre",
]


def gamma(x: float) -> float:
    """Euler's Gamma function for real ``x > 0``."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"gamma requires a finite positive argument, got {x!r}")
    return math.gamma(x)


def beta(x: float, y: float) -> float:
    """Euler's Beta function ``B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y)``."""
    x, y = float(x), float(y)
    if x <= 0.0 or y <= 0.0:
        raise DomainError(f"beta requires positive arguments, got {x!r}, {y!r}")
    if x + y < 150.0:
        return math.gamma(x) * math.gamma(y) / math.gamma(x + y)
    return math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


def beta_moment(alpha: float, beta_: float, t: float = 1.0) -> float:
    """Return ``int_0^t s**(alpha-1) (t - s)**(beta-1) ds = B(alpha, beta) t**(alpha+beta-1)``."""
    alpha, beta_, t = float(alpha), float(beta_), float(t)
    if not (alpha > 0.0 and beta_ > 0.0 and t > 0.0) or not math.isfinite(alpha + beta_ + t):
        raise DomainError(f"beta_moment requires positive parameters, got {alpha!r}, {beta_!r}, {t!r}")
    return beta(alpha, beta_) * t ** (alpha + beta_ - 1.0)


def jacobi_moment(alpha_left: float, alpha_right: float) -> float:
    """Return ``int_0^1 t**alpha_left * (1 - t)**alpha_right dt``.

    Raises :class:`SingularityError` when either exponent is ``<= -1``.
    """
    if alpha_left <= -1.0 or alpha_right <= -1.0:
        raise SingularityError(
            f"moment diverges for exponents ({alpha_left}, {alpha_right})"
        )
    return beta(alpha_left + 1.0, alpha_right + 1.0)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for ``int w(t) f(t) dt ~ sum(weights * f(nodes))``.

    ``exponents`` records the endpoint exponents ``(beta_left, beta_right)`` of
    the Jacobi weight built into ``weights``; ``interval`` is the integration
    interval.
    """

    n: int
    nodes: np.ndarray
    weights: np.ndarray
    exponents: tuple[float, float]
    interval: tuple[float, float] = (0.0, 1.0)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    def mapped(self, lo: float, hi: float) -> "QuadratureRule":
        """Affinely map a unit-interval rule onto ``(lo, hi)``."""
        a, b = self.interval
        if (a, b) != (0.0, 1.0):
            raise ValueError("only unit-interval rules can be mapped")
        length = hi - lo
        scale = length ** (1.0 + self.exponents[0] + self.exponents[1])
        return QuadratureRule(
            self.n,
            lo + length * self.nodes,
            scale * self.weights,
            self.exponents,
            (lo, hi),
        )

    @property
    def barycentric_weights(self) -> np.ndarray:
        """Barycentric interpolation weights for the (Jacobi) nodes.

        For Gauss rules the weights are proportional to
        ``(-1)**j * sqrt(t_j (1 - t_j) w_j)`` up to the weight scaling; they
        are normalised to unit maximum.
        """
        a, b = self.interval
        x = (self.nodes - a) / (b - a)
        w = self.weights / (b - a) ** (1.0 + sum(self.exponents))
        lam = np.sqrt(x * (1.0 - x) * w)
        lam[1::2] *= -1.0
        return lam / np.max(np.abs(lam))


def _frozen(*arrays):
    for arr in arrays:
        arr.setflags(write=False)
    return arrays


def _jacobi_recurrence(n: int, al: float, be: float):
    """Monic recurrence ``(a_k, b_k)`` for ``(1 - x)**al (1 + x)**be`` on (-1, 1)."""
    k = np.arange(n, dtype=float)
    s = 2.0 * k + al + be
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (be * be - al * al) / (s * (s + 2.0))
    a[0] = (be - al) / (al + be + 2.0)
    k = np.arange(1, n, dtype=float)
    s = 2.0 * k + al + be
    with np.errstate(divide="ignore", invalid="ignore"):
        b = 4.0 * k * (k + al) * (k + be) * (k + al + be) / (s * s * (s + 1.0) * (s - 1.0))
    if n > 1:
        # k = 1 in cancelled form, valid when al + be = -1
        b[0] = 4.0 * (1.0 + al) * (1.0 + be) / ((al + be + 2.0) ** 2 * (al + be + 3.0))
    return a, b


def _polish(x, n, al, be, sweeps=3):
    """Newton sweeps on the orthonormal recurrence; Christoffel-number weights."""
    a, b = _jacobi_recurrence(n + 1, al, be)
    sb = np.sqrt(np.concatenate([[0.0], b]))
    for _ in range(sweeps):
        p0, p1 = np.zeros_like(x), np.ones_like(x)
        d0, d1 = np.zeros_like(x), np.zeros_like(x)
        total = np.ones_like(x)
        for k in range(n):
            p2 = ((x - a[k]) * p1 - sb[k] * p0) / sb[k + 1]
            d2 = (p1 + (x - a[k]) * d1 - sb[k] * d0) / sb[k + 1]
            if k < n - 1:
                total += p2 * p2
            p0, p1, d0, d1 = p1, p2, d1, d2
        x = x - p1 / d1
    mu0 = 2.0 ** (al + be + 1.0) * math.exp(math.lgamma(al + 1.0) + math.lgamma(be + 1.0) - math.lgamma(al + be + 2.0))
    return x, mu0 / total


@lru_cache(maxsize=256)
def _gauss_jacobi_cached(n: int, beta_left: float, beta_right: float):
    # scipy's weight is (1 - x)**alpha (1 + x)**beta on (-1, 1); t = (1 + x)/2.
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        x, w = scipy.special.roots_jacobi(n, beta_right, beta_left)
        if np.all(np.isfinite(x)):
            x, w = _polish(x, n, beta_right, beta_left)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
        raise DomainError(f"Gauss-Jacobi rule failed for n={n}, ({beta_left}, {beta_right})")
    nodes = 0.5 * (1.0 + x)
    weights = w / 2.0 ** (1.0 + beta_left + beta_right)
    order = np.argsort(nodes)
    return _frozen(np.ascontiguousarray(nodes[order]), np.ascontiguousarray(weights[order]))


def gauss_jacobi(n: int, beta_left: float, beta_right: float) -> QuadratureRule:
    """Gauss rule for the weight ``t**beta_left * (1 - t)**beta_right`` on (0, 1).

    The rule is exact for polynomials of degree ``2 n - 1``.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"rule size must be positive, got {n}")
    if beta_left <= -1.0 or beta_right <= -1.0:
        raise DomainError(
            f"Jacobi exponents must exceed -1, got ({beta_left}, {beta_right})"
        )
    nodes, weights = _gauss_jacobi_cached(n, float(beta_left), float(beta_right))
    return QuadratureRule(n, nodes, weights, (float(beta_left), float(beta_right)))


def gauss_legendre(n: int) -> QuadratureRule:
    """Gauss-Legendre rule on (0, 1)."""
    return gauss_jacobi(n, 0.0, 0.0)


def _log_jacobi_moments(n_moments: int, e: float) -> np.ndarray:
    """Modified moments ``int_0^1 x**e (-log x) p_k(x) dx``.

    ``p_k`` are the monic shifted Legendre polynomials.  With
    ``mu_k(e) = int x**e P*_k = prod_{j<k}(e - j) / prod_{j<=k+1, j>=1}(e + j)``
    the log-weighted moment is ``-d mu_k / d e``.
    """
    out = np.empty(n_moments)
    for k in range(n_moments):
        num_roots = [e - j for j in range(k)]
        den_roots = [e + j for j in range(1, k + 2)]
        num = math.prod(num_roots) if num_roots else 1.0
        dnum = 0.0
        for i in range(len(num_roots)):
            dnum += math.prod(r for m, r in enumerate(num_roots) if m != i)
        den = math.prod(den_roots)
        dden_over_den = sum(1.0 / r for r in den_roots)
        dmu = dnum / den - num / den * dden_over_den
        lead = math.comb(2 * k, k)
        out[k] = -dmu / lead
    return out


def _modified_chebyshev(n: int, moments: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Recurrence coefficients from modified moments (Gautschi's algorithm)."""
    alpha = np.zeros(n)
    beta_ = np.zeros(n)
    sig_prev = np.zeros(2 * n)
    sig = moments[: 2 * n].copy()
    alpha[0] = a[0] + moments[1] / moments[0]
    beta_[0] = moments[0]
    for k in range(1, n):
        new = np.zeros(2 * n)
        for ell in range(k, 2 * n - k):
            new[ell] = (
                sig[ell + 1]
                - (alpha[k - 1] - a[ell]) * sig[ell]
                - beta_[k - 1] * sig_prev[ell]
                + b[ell] * sig[ell - 1]
            )
        alpha[k] = a[k] + new[k + 1] / new[k] - sig[k] / sig[k - 1]
        beta_[k] = new[k] / sig[k - 1]
        sig_prev, sig = sig, new
    return alpha, beta_


@lru_cache(maxsize=64)
def _gauss_jacobi_log_cached(n: int, e: float):
    k = np.arange(2 * n, dtype=float)
    a = np.full(2 * n, 0.5)
    b = np.zeros(2 * n)
    b[1:] = k[1:] ** 2 / (4.0 * (4.0 * k[1:] ** 2 - 1.0))
    alpha, beta_ = _modified_chebyshev(n, _log_jacobi_moments(2 * n, e), a, b)
    if np.any(beta_[1:] <= 0.0):
        raise DomainError("log-weight recurrence lost positivity")
    nodes, vecs = scipy.linalg.eigh_tridiagonal(alpha, np.sqrt(beta_[1:]))
    weights = beta_[0] * vecs[0, :] ** 2
    return _frozen(np.ascontiguousarray(nodes), np.ascontiguousarray(weights))


def gauss_jacobi_log(n: int, e: float = 0.0) -> QuadratureRule:
    """Gauss rule for the weight ``t**e * (-log t)`` on (0, 1), ``e > -1``.

    Built from modified Legendre moments, which keeps the recurrence well
    conditioned; intended for ``n`` up to about 40.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"rule size must be positive, got {n}")
    if e <= -1.0:
        raise DomainError(f"log-Jacobi exponent must exceed -1, got {e}")
    nodes, weights = _gauss_jacobi_log_cached(n, float(e))
    return QuadratureRule(n, nodes, weights, (float(e), 0.0))
