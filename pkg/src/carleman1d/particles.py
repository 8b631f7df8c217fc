"""Discrete particle oracle.

The ``N``-particle energy

    E_N(x) = N**-2 sum_{i<j} V(x_i - x_j) + N**-1 sum_i U(x_i)

has the continuum energy as its mean-field limit, so the empirical measure
of its minimiser approximates the equilibrium density.  It is minimised here
by a projected Newton method: barrier constraints are handled with an active
set, and steps are backtracked until they decrease the energy (Armijo) and
keep the particles strictly ordered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from .errors import DataError, DomainError
from .kernels import KernelSpec, PotentialSpec

_EPS = float(np.finfo(float).eps)

__all__ = [
    "ParticleConfiguration",
    "compare_to_density",
    "discrete_energy",
    "discrete_gradient",
    "initial_positions",
    "minimize_particles",
    "quantile_positions",
]


@dataclass(frozen=True)
class ParticleConfiguration:
    """Sorted particle positions with their energy and projected-gradient norm."""

    positions: np.ndarray
    energy: float = math.nan
    gradient_norm: float = math.nan
    iterations: int = 0
    converged: bool = False

    def __post_init__(self):
        x = np.asarray(self.positions, dtype=float).copy()
        if x.ndim != 1 or x.size < 1:
            raise DataError("positions must be a non-empty one-dimensional array")
        if not np.all(np.isfinite(x)):
            raise DataError("positions must be finite")
        if np.any(np.diff(x) <= 0.0):
            raise DataError("positions must be strictly increasing")
        x.setflags(write=False)
        object.__setattr__(self, "positions", x)

    @property
    def n(self) -> int:
        return self.positions.size

    @property
    def support(self) -> tuple[float, float]:
        return float(self.positions[0]), float(self.positions[-1])

    def cdf(self, t) -> np.ndarray:
        """Right-continuous empirical distribution function."""
        t = np.asarray(t, dtype=float)
        return np.searchsorted(self.positions, t, side="right") / self.n


def _positions(config) -> np.ndarray:
    if isinstance(config, ParticleConfiguration):
        return config.positions
    return np.asarray(config, dtype=float)


def discrete_energy(config, kernel: KernelSpec, potential: PotentialSpec) -> float:
    """``E_N``; ``inf`` for coincident particles or particles beyond a barrier."""
    x = _positions(config)
    n = x.size
    s1, s2 = potential.barriers
    if np.any(x < s1) or np.any(x > s2):
        return math.inf
    i, j = np.triu_indices(n, 1)
    r = x[j] - x[i]
    if np.any(r == 0.0):
        return math.inf
    pair = float(np.sum(kernel.value(r)))
    return pair / n**2 + float(np.sum(potential.value(x))) / n


def discrete_gradient(config, kernel: KernelSpec, potential: PotentialSpec) -> np.ndarray:
    """Gradient of ``E_N`` with respect to the positions."""
    x = _positions(config)
    n = x.size
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    d1 = kernel.derivative(diff)
    np.fill_diagonal(d1, 0.0)
    return d1.sum(axis=1) / n**2 + potential.derivative(x) / n


def _hessian(x, kernel, potential):
    n = x.size
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    d2 = kernel.second_derivative(diff)
    np.fill_diagonal(d2, 0.0)
    hess = -d2 / n**2
    hess[np.diag_indices(n)] = d2.sum(axis=1) / n**2 + potential.second_derivative(x) / n
    return hess


def initial_positions(n: int, potential: PotentialSpec, seed: int = 0) -> np.ndarray:
    """Equispaced start on the barrier interval (or ``[-1, 1]``), lightly jittered by ``seed``."""
    s1, s2 = potential.barriers
    if math.isfinite(s1) and math.isfinite(s2):
        lo, hi = s1, s2
    elif math.isfinite(s1):
        lo, hi = s1, s1 + 2.0
    elif math.isfinite(s2):
        lo, hi = s2 - 2.0, s2
    else:
        lo, hi = -1.0, 1.0
    x = np.linspace(lo, hi, n)
    if n > 2:
        rng = np.random.default_rng(seed)
        h = (hi - lo) / (n - 1)
        x[1:-1] += 0.25 * h * rng.uniform(-1.0, 1.0, n - 2)
    return x


def _projected_gradient(x, g, s1, s2):
    pg = g.copy()
    pg[(x <= s1) & (g > 0.0)] = 0.0
    pg[(x >= s2) & (g < 0.0)] = 0.0
    return pg


def minimize_particles(
    n: int,
    kernel: KernelSpec,
    potential: PotentialSpec,
    seed: int = 0,
    max_iter: int = 100_000,
    gtol: float | None = None,
    initial=None,
) -> ParticleConfiguration:
    """Minimise ``E_N`` over ordered configurations respecting the barriers.

    Stops when the Euclidean norm of the projected gradient is at most
    ``gtol`` (default ``1e-8 * n``), when no admissible step lowers the
    energy, or after ``max_iter`` iterations; :attr:`converged` records
    whether the gradient test was met.  Identical inputs give bit-identical
    results.
    """
    n = int(n)
    if n < 2:
        raise DomainError(f"need at least two particles, got {n}")
    gtol = 1e-8 * n if gtol is None else float(gtol)
    s1, s2 = potential.barriers
    if initial is None:
        x = initial_positions(n, potential, seed)
    else:
        x = np.sort(np.asarray(initial, dtype=float))
        if x.size != n:
            raise DataError("initial configuration has the wrong size")
    x = np.clip(x, s1, s2)
    energy = discrete_energy(x, kernel, potential)
    if not math.isfinite(energy):
        raise DataError("initial configuration has infinite energy")
    scale = max(float(x[-1] - x[0]), 1.0)
    it = 0
    g = discrete_gradient(x, kernel, potential)
    pg = _projected_gradient(x, g, s1, s2)
    gnorm = float(np.linalg.norm(pg))
    converged = gnorm <= gtol
    while not converged and it < max_iter:
        it += 1
        free = pg != 0.0
        free |= (x > s1) & (x < s2)
        hess = _hessian(x, kernel, potential)[np.ix_(free, free)]
        shift = 1e-14 * max(float(np.max(np.abs(np.diag(hess)))), 1e-300)
        step = np.zeros(n)
        try:
            c, low = scipy.linalg.cho_factor(hess + shift * np.eye(hess.shape[0]))
            step[free] = -scipy.linalg.cho_solve((c, low), g[free])
        except np.linalg.LinAlgError:
            step[free] = -g[free] * n
        slope = float(np.dot(g, step))
        if slope >= 0.0:
            step = -pg * n
            slope = float(np.dot(g, step))
        alpha = 1.0
        accepted = False
        while alpha > 1e-14:
            trial = np.clip(x + alpha * step, s1, s2)
            if np.all(np.diff(trial) > 1e-12 * scale):
                e_trial = discrete_energy(trial, kernel, potential)
                if e_trial <= energy + 1e-4 * alpha * min(slope, 0.0) and e_trial < energy:
                    accepted = True
                    break
                # near the minimum the energy difference drowns in rounding;
                # a full Newton step that shrinks the gradient is then kept
                if alpha == 1.0 and e_trial <= energy + 8.0 * _EPS * abs(energy):
                    g_trial = _projected_gradient(trial, discrete_gradient(trial, kernel, potential), s1, s2)
                    if np.linalg.norm(g_trial) < 0.5 * gnorm:
                        accepted = True
                        break
            alpha *= 0.5
        if not accepted:
            break
        x, energy = trial, e_trial
        g = discrete_gradient(x, kernel, potential)
        pg = _projected_gradient(x, g, s1, s2)
        gnorm = float(np.linalg.norm(pg))
        converged = gnorm <= gtol
    return ParticleConfiguration(x, energy, gnorm, it, converged)


def _support_of(solution):
    lo, hi = solution.support if hasattr(solution, "support") else solution.interval
    return float(lo), float(hi)


def quantile_positions(solution, n: int) -> np.ndarray:
    """Positions ``F**-1((i - 1/2)/n)`` of the continuum distribution ``F``."""
    lo, hi = _support_of(solution)
    probs = (np.arange(n) + 0.5) / n
    grid = np.linspace(lo, hi, 4097)
    cdf = np.maximum.accumulate(solution.cdf(grid))
    out = np.empty(n)
    for k, p in enumerate(probs):
        j = int(np.clip(np.searchsorted(cdf, p), 1, grid.size - 1))
        out[k] = brentq(lambda t: float(solution.cdf(np.array([t]))[0]) - p, grid[j - 1], grid[j], xtol=1e-14)
    return out


def compare_to_density(config, solution, n_grid: int = 2**14) -> tuple[float, float]:
    """Wasserstein-1 and sup-CDF distances between particles and a continuum density.

    ``solution`` is anything with a ``cdf`` method and a ``support`` (or
    ``interval``).  ``W1 = int |F_N - F|`` is integrated by the trapezoidal
    rule on ``n_grid`` points spanning both supports; the sup distance also
    looks at both one-sided limits of ``F_N`` at every particle.
    """
    x = _positions(config)
    n = x.size
    lo, hi = _support_of(solution)
    a, b = min(lo, x[0]), max(hi, x[-1])
    grid = np.linspace(a, b, n_grid)
    f_cont = solution.cdf(grid)
    f_emp = np.searchsorted(x, grid, side="right") / n
    w1 = float(trapezoid(np.abs(f_emp - f_cont), grid))
    at = solution.cdf(x)
    right = np.arange(1, n + 1) / n
    left = np.arange(0, n) / n
    sup = max(
        float(np.max(np.abs(f_emp - f_cont))),
        float(np.max(np.abs(right - at))),
        float(np.max(np.abs(left - at))),
    )
    return w1, sup
