"""Minimising densities of ``E(rho) = 1/2 <V * rho, rho> + <U, rho>``.

On a fixed interval the minimiser satisfies ``h = V * rho + U = C`` on the
support.  After mapping the interval to ``[0, 1]`` the Euler-Lagrange
relation reads ``rho = C_a(C - V_reg * rho - U)`` with ``int rho = 1``; since
``C_a`` is linear this is a square linear system in the smooth factor of
``rho`` at Gauss-Jacobi nodes and the constant ``C``.

Free endpoints are found by driving the endpoint blow-up coefficients of
the fixed-interval solution to zero.  The converged density is then stored
with the vanishing exponent ``(1+a)/2`` on every free side.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq, root

from .carleman import CarlemanOperator, weight_exponent
from .errors import (
    ConditioningError,
    ConvergenceError,
    DataError,
    DomainError,
    SolutionRejectedError,
)
from .kernels import KernelSpec, PotentialSpec, ScaledVReg, check_assumptions, kernel_fourier
from .singular_ops import WeightedFunction, kernel_convolution, smooth_convolution
from .specfun import gauss_jacobi

__all__ = [
    "Diagnostics",
    "EquilibriumSolution",
    "Normalisation",
    "WeightedDensity",
    "affine_rescale",
    "endpoint_exponent",
    "energy",
    "energy_fourier",
    "h_function",
    "solve_fixed_interval",
    "solve_free_boundary",
]

_MODES = ("blowup", "vanishing", "mixed")


# --------------------------------------------------------------------------
# Data types


@dataclass(frozen=True)
class WeightedDensity(WeightedFunction):
    """A density ``(t - t1)**el (t2 - t)**er g(t)`` tagged with its endpoint profile.

    ``exponent_mode`` is ``"blowup"`` (both exponents ``-(1-a)/2``),
    ``"vanishing"`` (both ``+(1+a)/2``) or ``"mixed"`` (one of each).
    """

    exponent_mode: str = "blowup"

    def __post_init__(self):
        super().__post_init__()
        if self.exponent_mode not in _MODES:
            raise DataError(f"unknown exponent mode {self.exponent_mode!r}")
        el, er = self.exponents
        expected = {
            "blowup": el < 0.0 and er < 0.0,
            "vanishing": el > 0.0 and er > 0.0,
            "mixed": (el < 0.0) != (er < 0.0),
        }[self.exponent_mode]
        if not expected:
            raise DataError(f"exponents {self.exponents} are inconsistent with mode {self.exponent_mode!r}")
        if not np.all(np.isfinite(self.values)):
            raise DataError("density smooth factor must be finite")

    @classmethod
    def from_weighted(cls, u: WeightedFunction, mode: str) -> "WeightedDensity":
        return cls(u.interval, u.exponents, u.values, mode)

    @property
    def support(self) -> tuple[float, float]:
        return self.interval

    def density_cdf(self, t) -> np.ndarray:
        return self.cdf(t)


@dataclass(frozen=True)
class Diagnostics:
    mass_error: float
    h_flatness: float
    h_exterior_min_gap: float
    endpoint_coeffs: tuple[float, float]
    iterations: int
    residual_sup: float
    profile_case: str
    min_density: float
    condition_number: float = math.nan
    method: str = "direct"

    def as_dict(self) -> dict:
        out = asdict(self)
        out["endpoint_coeffs"] = list(self.endpoint_coeffs)
        return out


@dataclass(frozen=True)
class EquilibriumSolution:
    """Minimiser on ``[t1, t2]`` with its constant ``C`` and diagnostics."""

    t1: float
    t2: float
    constant_C: float
    density: WeightedDensity
    diagnostics: Diagnostics
    kernel: KernelSpec = field(repr=False, default=None)
    potential: PotentialSpec = field(repr=False, default=None)

    @property
    def support(self) -> tuple[float, float]:
        return self.t1, self.t2

    @property
    def a(self) -> float:
        return self.kernel.a

    def __call__(self, t) -> np.ndarray:
        return self.density(t)

    def cdf(self, t) -> np.ndarray:
        return self.density.cdf(t)

    def h(self, t) -> np.ndarray:
        return h_function(self, self.kernel, self.potential, t)


@dataclass(frozen=True)
class Normalisation:
    """Record of the affine map ``x = (t - t1)/L`` onto ``[0, 1]``.

    The rescaled kernel is ``V(r) = L**s Vt(L r) - 2 c`` with ``s = a``
    (``s = 0`` and an additive ``-log L`` for the logarithmic kernel), and
    ``c`` makes ``V(1) = -V'(1)``.  Constants and energies map back as
    ``Ct = L**-a (C + 2c)`` and ``Et = L**-a (E + c)``; for ``a = 0`` the
    constant gains ``-log L``.
    """

    t1: float
    t2: float
    a: float
    c: float

    @property
    def length(self) -> float:
        return self.t2 - self.t1

    @property
    def energy_scale(self) -> float:
        return self.length ** (-self.a)

    def to_unit(self, t):
        return (np.asarray(t, dtype=float) - self.t1) / self.length

    def from_unit(self, x):
        return self.t1 + self.length * np.asarray(x, dtype=float)

    def constant_back(self, constant: float) -> float:
        if self.a == 0.0:
            return constant + 2.0 * self.c - math.log(self.length)
        return self.energy_scale * (constant + 2.0 * self.c)

    def energy_back(self, value: float) -> float:
        if self.a == 0.0:
            return value + self.c - 0.5 * math.log(self.length)
        return self.energy_scale * (value + self.c)

    def pull_back(self, u: WeightedFunction) -> WeightedFunction:
        """Density on ``[t1, t2]`` from one on ``[0, 1]`` (mass preserved)."""
        el, er = u.exponents
        scale = self.length ** (-1.0 - el - er)
        return WeightedFunction((self.t1, self.t2), u.exponents, scale * u.values)

    def push_forward(self, u: WeightedFunction) -> WeightedFunction:
        """Density on ``[0, 1]`` from one on ``[t1, t2]`` (mass preserved)."""
        el, er = u.exponents
        scale = self.length ** (1.0 + el + er)
        return WeightedFunction((0.0, 1.0), u.exponents, scale * u.values)

    def as_dict(self) -> dict:
        return {"t1": self.t1, "t2": self.t2, "L": self.length, "c": self.c, "energy_scale": self.energy_scale}


# --------------------------------------------------------------------------
# Affine rescaling


def affine_rescale(kernel: KernelSpec, potential: PotentialSpec, t1: float, t2: float):
    """Map the problem on ``[t1, t2]`` to an equivalent problem on ``[0, 1]``.

    Returns ``(kernel, potential, Normalisation)``.
    """
    t1, t2 = float(t1), float(t2)
    if not (math.isfinite(t1) and math.isfinite(t2)) or not t1 < t2:
        raise DomainError(f"affine rescale needs finite t1 < t2, got ({t1}, {t2})")
    a = kernel.a
    length = t2 - t1
    amplitude = 1.0 if a == 0.0 else length**a
    # unshifted rescaled kernel: V_a + amplitude * Vt_reg(L r)
    base = KernelSpec(a, ScaledVReg(kernel.vreg, length, amplitude, 0.0))
    c = 0.5 * float(base.value(1.0) + base.derivative(1.0))
    new_kernel = KernelSpec(a, ScaledVReg(kernel.vreg, length, amplitude, -2.0 * c))
    new_potential = potential.composed(length, t1, amplitude)
    return new_kernel, new_potential, Normalisation(t1, t2, a, c)


# --------------------------------------------------------------------------
# Fixed interval on [0, 1]


@dataclass(frozen=True)
class _UnitSolve:
    a: float
    values: np.ndarray  # G at the Gauss-Jacobi nodes
    constant: float
    f_cheb: np.ndarray  # right-hand side f = C - V_reg * rho - U at Chebyshev points
    endpoints: tuple[float, float]  # G(0), G(1)
    condition_number: float
    iterations: int
    degree: int


@lru_cache(maxsize=16)
def _unit_operator(a: float, n_nodes: int, degree: int):
    b = weight_exponent(a)
    rule = gauss_jacobi(n_nodes, -b, -b)
    op = CarlemanOperator(a, np.concatenate([rule.nodes, [0.0, 1.0]]), degree)
    return rule, op


def _solve_unit(kernel: KernelSpec, potential: PotentialSpec, n_nodes: int, degree: int, method: str):
    a = kernel.a
    rule, op = _unit_operator(a, n_nodes, degree)
    body, ends = op.matrix[:n_nodes], op.matrix[n_nodes:]
    z, x, w = op.points, rule.nodes, rule.weights
    vreg = kernel.vreg.value(z[:, None] - x[None, :])
    u_z = potential.value(z)
    k1 = body.sum(axis=1)
    rhs_u = body @ u_z
    coupling = body @ (vreg * w[None, :])
    n = n_nodes
    system = np.zeros((n + 1, n + 1))
    system[:n, :n] = coupling
    system[np.arange(n), np.arange(n)] += 1.0
    system[:n, n] = -k1
    system[n, :n] = w
    cond = float(np.linalg.cond(system))
    if not math.isfinite(cond) or cond > 1e12:
        raise ConditioningError(f"equilibrium system condition number {cond:.3e} exceeds 1e12")
    iterations = 1
    if method == "direct":
        sol = np.linalg.solve(system, np.concatenate([-rhs_u, [1.0]]))
        g, constant = sol[:n], float(sol[n])
    elif method == "picard":
        g, constant, iterations = _picard(coupling, k1, rhs_u, w)
    else:
        raise DataError(f"unknown solver method {method!r}")
    f = constant - vreg @ (w * g) - u_z
    e0, e1 = ends @ f
    return _UnitSolve(a, g, constant, f, (float(e0), float(e1)), cond, iterations, degree)


def _picard(coupling, k1, rhs_u, w, damping=0.5, tol=1e-10, max_iter=200):
    """Damped fixed-point iteration ``G <- (1-d) G + d T(G)`` with the mass fixing ``C``."""
    g = k1 / float(w @ k1)
    for it in range(1, max_iter + 1):
        base = -coupling @ g - rhs_u
        constant = (1.0 - float(w @ base)) / float(w @ k1)
        new = (1.0 - damping) * g + damping * (base + constant * k1)
        step = float(np.max(np.abs(new - g)))
        g = new
        if step <= tol * max(1.0, float(np.max(np.abs(g)))):
            base = -coupling @ g - rhs_u
            constant = (1.0 - float(w @ base)) / float(w @ k1)
            return g, constant, it
    raise ConvergenceError(
        f"damped fixed-point iteration did not converge in {max_iter} steps",
        {"last_step": step, "iterations": max_iter},
    )


# --------------------------------------------------------------------------
# Diagnostics helpers


def h_function(solution, kernel: KernelSpec, potential: PotentialSpec, t) -> np.ndarray:
    """``h(t) = (V * rho)(t) + U(t)``; ``inf`` beyond a barrier."""
    density = solution.density if hasattr(solution, "density") else solution
    shape = np.shape(t)
    t = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    conv = kernel_convolution(kernel.a, density, t)
    conv = conv + smooth_convolution(kernel.vreg.value, density, t)
    s1, s2 = potential.barriers
    out = conv + potential.value(t)
    return np.where((t < s1) | (t > s2), np.inf, out).reshape(shape)


def endpoint_exponent(density: WeightedFunction, side: str, decades=(1e-4, 1e-2), n: int = 9) -> float:
    """Slope of ``log rho`` against ``log dist`` near one endpoint (least squares)."""
    lo, hi = density.interval
    d = density.length * np.geomspace(decades[0], decades[1], n)
    t = lo + d if side == "left" else hi - d
    rho = density(t)
    if np.any(rho <= 0.0):
        return math.nan
    slope, _ = np.polyfit(np.log(d), np.log(rho), 1)
    return float(slope)


def _exterior_grid(t1, t2, potential, sides, n=30):
    s1, s2 = potential.barriers
    length = t2 - t1
    d = length * np.geomspace(1e-3, 1.0, n)
    pts = []
    if sides[0]:
        left = t1 - d
        pts.append(left[left >= s1])
    if sides[1]:
        right = t2 + d
        pts.append(right[right <= s2])
    return np.concatenate(pts) if pts else np.empty(0)


def _diagnose(density, constant, kernel, potential, free_sides, endpoint_coeffs, iterations, profile, cond, method):
    lo, hi = density.interval
    mass_error = abs(density.integral() - 1.0)
    h_nodes = h_function(density, kernel, potential, density.nodes)
    flat = float(np.max(np.abs(h_nodes - constant)))
    targets = np.linspace(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo), 50)
    resid = float(np.max(np.abs(h_function(density, kernel, potential, targets) - constant)))
    ext = _exterior_grid(lo, hi, potential, free_sides)
    gap = float(np.min(h_function(density, kernel, potential, ext) - constant)) if ext.size else math.inf
    min_density = float(np.min(density.values))
    return Diagnostics(
        mass_error, flat, gap, tuple(float(c) for c in endpoint_coeffs), int(iterations), resid, profile,
        min_density, cond, method,
    )


def _vanishing_values(unit: _UnitSolve, free_left: bool, free_right: bool, n_nodes: int):
    """Smooth factor after moving the weight exponent from ``-b`` to ``1-b`` on free sides."""
    a = unit.a
    b = weight_exponent(a)
    el = 1.0 - b if free_left else -b
    er = 1.0 - b if free_right else -b
    rule = gauss_jacobi(n_nodes, el, er)
    op = CarlemanOperator(a, rule.nodes, unit.degree)
    g = op.apply_values(unit.f_cheb)
    x = rule.nodes
    c0, c1 = unit.endpoints
    if free_left and free_right:
        h = (g - c0 * (1.0 - x) - c1 * x) / (x * (1.0 - x))
    elif free_left:
        h = (g - c0 * (1.0 - x)) / x
    elif free_right:
        h = (g - c1 * x) / (1.0 - x)
    else:
        h = g
    return (el, er), h


def _profile(free_left, free_right):
    if free_left and free_right:
        return "no_barriers", "vanishing"
    if free_left or free_right:
        return "one_barrier", "mixed"
    return "two_barriers", "blowup"


# --------------------------------------------------------------------------
# Public solvers


def solve_fixed_interval(
    kernel: KernelSpec,
    potential: PotentialSpec,
    interval=None,
    n_nodes: int = 256,
    degree: int = 64,
    method: str = "direct",
    check: bool = True,
    tolerance: float = 1e-9,
) -> EquilibriumSolution:
    """Minimiser over probability densities on a fixed interval.

    ``interval`` defaults to the barrier interval when both barriers are
    finite and to ``[0, 1]`` otherwise.  ``method="picard"`` replaces the
    direct solve by the damped fixed-point iteration.  With ``check=True``
    the structural assumptions must hold (the slope bound between ``U`` and
    ``V`` is only a sufficient condition for positivity and is reported, not
    enforced) and a solution with negative density is rejected.
    """
    if interval is None:
        s1, s2 = potential.barriers
        interval = (s1, s2) if math.isfinite(s1) and math.isfinite(s2) else (0.0, 1.0)
    t1, t2 = (float(v) for v in interval)
    unit_kernel, unit_potential, norm = affine_rescale(kernel, potential, t1, t2)
    if check:
        check_assumptions(unit_kernel, unit_potential, "fixed_interval").require(ignore=("potential_slope",))
    unit = _solve_unit(unit_kernel, unit_potential, n_nodes, degree, method)
    b = weight_exponent(kernel.a)
    density_unit = WeightedFunction((0.0, 1.0), (-b, -b), unit.values)
    density = WeightedDensity.from_weighted(norm.pull_back(density_unit), "blowup")
    constant = norm.constant_back(unit.constant)
    coeffs = tuple(c * norm.length ** (b - 1.0) for c in unit.endpoints)
    diag = _diagnose(
        density, constant, kernel, potential, (False, False), coeffs, unit.iterations, "two_barriers",
        unit.condition_number, method,
    )
    solution = EquilibriumSolution(t1, t2, constant, density, diag, kernel, potential)
    if check:
        if diag.min_density < -1e-8 * max(1.0, float(np.max(np.abs(density.values)))):
            raise SolutionRejectedError("fixed-interval solution has negative density", diag.as_dict())
        if diag.mass_error > tolerance:
            raise SolutionRejectedError("mass constraint violated", diag.as_dict())
    return solution


def _symmetry_centre(potential: PotentialSpec):
    """Centre ``m`` when ``U`` and the barriers are mirror symmetric about ``m``, else ``None``."""
    p = potential.poly
    dp = p.deriv()
    crit = [r.real for r in dp.roots() if abs(r.imag) < 1e-12] if p.degree() >= 2 else []
    if not crit:
        return None
    if p.degree() == 2:
        c = potential.coefficients
        m = -c[1] / (2.0 * c[2])
    else:
        m = min(crit, key=lambda r: float(p(r)))
    s1, s2 = potential.barriers
    if math.isinf(s1) != math.isinf(s2):
        return None
    if math.isfinite(s1) and abs((s1 + s2) - 2.0 * m) > 1e-12 * max(1.0, abs(s1) + abs(s2)):
        return None
    from numpy.polynomial import Polynomial

    shifted = p(Polynomial([m, 1.0]))
    odd = shifted.coef[1::2]
    if np.max(np.abs(odd), initial=0.0) > 1e-12 * max(1.0, float(np.max(np.abs(shifted.coef)))):
        return None
    return m


def _initial_support(kernel, potential, n_particles=40):
    """Support estimate and barrier contacts from a small particle run."""
    from .particles import minimize_particles

    s1, s2 = potential.barriers
    try:
        cfg = minimize_particles(n_particles, kernel, potential, seed=0, max_iter=500)
        x = cfg.positions
        spacing = (x[-1] - x[0]) / (x.size - 1)
        pinned_left = math.isfinite(s1) and x[0] <= s1 + 1e-9 * max(1.0, abs(s1))
        pinned_right = math.isfinite(s2) and x[-1] >= s2 - 1e-9 * max(1.0, abs(s2))
        lo = s1 if pinned_left else x[0] - spacing
        hi = s2 if pinned_right else x[-1] + spacing
        return max(lo, s1), min(hi, s2), pinned_left, pinned_right
    except Exception:  # noqa: BLE001 - fall back to a level-set bound
        t = np.linspace(max(s1, -50.0), min(s2, 50.0), 20001)
        u = potential.value(t)
        inside = t[u <= np.min(u) + 1.0]
        return float(inside[0]), float(inside[-1]), False, False


def solve_free_boundary(
    kernel: KernelSpec,
    potential: PotentialSpec,
    n_nodes: int = 256,
    degree: int = 64,
    max_outer: int = 60,
    tolerance: float = 1e-8,
    exterior_tol: float = 1e-5,
    check: bool = True,
    initial=None,
) -> EquilibriumSolution:
    """Minimiser with unknown support inside the barriers.

    Barrier sides are pinned and stay pinned while their blow-up coefficient
    is non-negative; free sides are moved until the coefficient vanishes.
    Even potentials (about their minimiser) are solved for one half-length.
    ``initial`` optionally supplies ``(t1, t2)`` and bypasses the particle
    warm start.
    """
    if check:
        check_assumptions(kernel, potential, "free_boundary").require()
    s1, s2 = potential.barriers
    b = weight_exponent(kernel.a)
    if initial is None:
        lo0, hi0, pin_l, pin_r = _initial_support(kernel, potential)
    else:
        lo0, hi0 = (float(v) for v in initial)
        pin_l = math.isfinite(s1) and lo0 <= s1
        pin_r = math.isfinite(s2) and hi0 >= s2
    centre = _symmetry_centre(potential)
    count = [0]

    def unit_solve(t1, t2):
        count[0] += 1
        if count[0] > 4 * max_outer:
            raise ConvergenceError("free-boundary search exceeded its evaluation budget", {"evaluations": count[0]})
        k, p, norm = affine_rescale(kernel, potential, t1, t2)
        unit = _solve_unit(k, p, n_nodes, degree, "direct")
        scale = max(float(np.max(np.abs(unit.values))), 1e-300)
        return unit, norm, scale

    for _attempt in range(4):
        if pin_l and pin_r:
            t1, t2 = s1, s2
            unit, norm, _ = unit_solve(t1, t2)
        elif pin_l or pin_r:
            anchor = s1 if pin_l else s2
            side = 1 if pin_l else 0
            start = abs((hi0 if pin_l else lo0) - anchor)
            limit = (s2 - s1) if math.isfinite(s1) and math.isfinite(s2) else math.inf
            ell = _root_1d(
                lambda ell: _coeff(unit_solve(*_ends(anchor, ell, pin_l)), side), start, limit, max_outer
            )
            t1, t2 = _ends(anchor, ell, pin_l)
            unit, norm, _ = unit_solve(t1, t2)
        elif centre is not None:
            half = max(abs(hi0 - centre), abs(centre - lo0))
            limit = 0.5 * (s2 - s1) if math.isfinite(s1) else math.inf
            ell = _root_1d(lambda ell: _coeff(unit_solve(centre - ell, centre + ell), 0), half, limit, max_outer)
            t1, t2 = centre - ell, centre + ell
            unit, norm, _ = unit_solve(t1, t2)
        else:
            t1, t2 = _root_2d(unit_solve, lo0, hi0, max_outer, tolerance)
            unit, norm, _ = unit_solve(t1, t2)
        scale = max(float(np.max(np.abs(unit.values))), 1e-300)
        c0, c1 = unit.endpoints
        changed = False
        if pin_l and c0 < -tolerance * scale:
            pin_l, changed = False, True
        if pin_r and c1 < -tolerance * scale:
            pin_r, changed = False, True
        if not pin_l and math.isfinite(s1) and t1 < s1:
            pin_l, changed = True, True
        if not pin_r and math.isfinite(s2) and t2 > s2:
            pin_r, changed = True, True
        if not changed:
            break
        lo0, hi0 = max(t1, s1), min(t2, s2)
    else:
        raise ConvergenceError("barrier contact pattern did not settle", {"t1": t1, "t2": t2})

    free = (not pin_l, not pin_r)
    for is_free, coeff in zip(free, unit.endpoints):
        if is_free and abs(coeff) > 1e3 * tolerance * scale:
            raise ConvergenceError(
                "endpoint coefficient did not vanish",
                {"t1": t1, "t2": t2, "endpoint_coeffs": list(unit.endpoints), "evaluations": count[0]},
            )
    profile, mode = _profile(*free)
    exps, values = _vanishing_values(unit, free[0], free[1], n_nodes)
    density_unit = WeightedFunction((0.0, 1.0), exps, values)
    density = WeightedDensity.from_weighted(norm.pull_back(density_unit), mode)
    constant = norm.constant_back(unit.constant)
    coeffs = tuple(c * norm.length ** (b - 1.0) for c in unit.endpoints)
    diag = _diagnose(density, constant, kernel, potential, free, coeffs, count[0], profile, unit.condition_number, "direct")
    solution = EquilibriumSolution(float(t1), float(t2), constant, density, diag, kernel, potential)
    if check and diag.h_exterior_min_gap < -exterior_tol:
        raise SolutionRejectedError("h falls below C outside the support", diag.as_dict())
    return solution


def _ends(anchor, ell, left_pinned):
    return (anchor, anchor + ell) if left_pinned else (anchor - ell, anchor)


def _coeff(result, side):
    unit, _norm, scale = result
    return unit.endpoints[side] / scale


def _root_1d(fun, start, limit, max_outer):
    """Root of a coefficient that is positive for short and negative for long intervals."""
    lo = hi = max(min(start, 0.999 * limit if math.isfinite(limit) else start), 1e-6)
    f_lo = f_hi = fun(lo)
    steps = 0
    if f_lo > 0.0:
        while f_hi > 0.0:
            lo, f_lo = hi, f_hi
            hi = min(1.5 * hi, limit) if math.isfinite(limit) else 1.5 * hi
            if hi == lo:
                return hi
            f_hi = fun(hi)
            steps += 1
            if steps > max_outer:
                raise ConvergenceError("could not bracket the free endpoint from above", {"last": hi})
    else:
        while f_lo <= 0.0:
            if f_lo == 0.0:
                return lo
            hi, f_hi = lo, f_lo
            lo = lo / 1.5
            f_lo = fun(lo)
            steps += 1
            if steps > max_outer:
                raise ConvergenceError("could not bracket the free endpoint from below", {"last": lo})
    ell, info = brentq(fun, lo, hi, xtol=1e-14, rtol=4.0 * np.finfo(float).eps, maxiter=max_outer, full_output=True)
    if not info.converged:
        raise ConvergenceError("endpoint root-find did not converge", {"bracket": [lo, hi]})
    return ell


def _root_2d(unit_solve, lo0, hi0, max_outer, tolerance):
    def residual(p):
        m, log_half = p
        half = math.exp(log_half)
        unit, _norm, scale = unit_solve(m - half, m + half)
        return np.array(unit.endpoints) / scale

    guess = np.array([0.5 * (lo0 + hi0), math.log(0.5 * (hi0 - lo0))])
    sol = root(residual, guess, method="hybr", options={"xtol": 1e-13, "maxfev": 2 * max_outer})
    if not sol.success or np.max(np.abs(sol.fun)) > 1e3 * tolerance:
        raise ConvergenceError(
            f"two-endpoint search failed: {sol.message}", {"x": sol.x.tolist(), "residual": sol.fun.tolist()}
        )
    m, half = sol.x[0], math.exp(sol.x[1])
    return m - half, m + half


# --------------------------------------------------------------------------
# Energies


def energy(density: WeightedFunction, kernel: KernelSpec, potential: PotentialSpec, n_outer: int = 256) -> float:
    """``E(rho) = 1/2 int (V * rho) rho + int U rho`` by Jacobi-weighted quadrature.

    The inner convolution is split at the diagonal and integrated with the
    singular end rules.  The outer integral uses the density's own Gauss
    rule, resampled to at least ``n_outer`` nodes because the potential
    ``V * rho`` has ``t log t``-type terms at the endpoints.
    Returns ``inf`` when an endpoint exponent makes the interaction
    integral diverge (exponent at most ``a/2 - 1`` for ``a > 0``).
    """
    a = kernel.a
    if a > 0.0 and min(density.exponents) <= 0.5 * a - 1.0:
        return math.inf
    fine = density.resampled(n_outer) if density.n < n_outer else density
    rule = fine.rule
    inner = kernel_convolution(a, density, rule.nodes) + smooth_convolution(kernel.vreg.value, density, rule.nodes)
    pair = float(np.dot(rule.weights, fine.values * inner))
    field_term = float(np.dot(rule.weights, fine.values * potential.value(rule.nodes)))
    value = 0.5 * pair + field_term
    return value if math.isfinite(value) else math.inf


def energy_fourier(
    density: WeightedFunction,
    kernel: KernelSpec,
    potential: PotentialSpec,
    omega_max: float = 60.0,
    n_omega: int = 1201,
    n_fourier: int = 512,
) -> float:
    """Energy from ``1/2 int V_hat |rho_hat|**2`` on the compactly extended kernel.

    The kernel is shifted by ``c`` and extended linearly beyond ``r0 = L``,
    the support length, so the extension equals ``V + c`` for every pair of
    points of the support; the shift contributes ``c/2`` and is removed.
    The frequency integral is truncated at ``omega_max`` and is therefore
    accurate for densities whose transform decays fast (vanishing profiles).
    """
    length = density.length
    omegas = np.linspace(0.0, omega_max, n_omega)
    four = kernel_fourier(kernel, b=2.0 * length, omega_grid=omegas, r0=length)
    fine = density.resampled(n_fourier) if density.n < n_fourier else density
    rule = fine.rule
    phase = 2.0 * np.pi * omegas[:, None] * (rule.nodes[None, :] - density.interval[0])
    mass = rule.weights * fine.values
    re = np.cos(phase) @ mass
    im = np.sin(phase) @ mass
    spectrum = four.values * (re**2 + im**2)
    # even integrand on the real line: twice the half-line Simpson sum
    pair = 2.0 * float(simpson(spectrum, x=omegas))
    field_term = float(np.dot(rule.weights, fine.values * potential.value(rule.nodes)))
    return 0.5 * pair + field_term - 0.5 * four.shift
