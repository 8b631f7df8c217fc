"""Interaction kernels, external potentials and their structural checks.

A kernel is ``V = V_a + V_reg`` with the singular part
``V_a(r) = |r|**(-a)`` for ``0 < a < 1`` and ``V_0(r) = -log|r|``, and a smooth
even correction ``V_reg``.  Potentials are polynomials ``U`` together with
hard barriers ``(s1, s2)`` confining the support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import CubicSpline

from .errors import DataError, DomainError, PreconditionError, SingularityError
from .specfun import gauss_jacobi, gauss_jacobi_log, gauss_legendre

__all__ = [
    "AssumptionCheck",
    "AssumptionReport",
    "DislocationVReg",
    "KernelFourier",
    "KernelSpec",
    "PolynomialVReg",
    "PotentialSpec",
    "ScaledVReg",
    "TabulatedVReg",
    "ZeroVReg",
    "check_assumptions",
    "dislocation_vreg",
    "kernel_fourier",
    "riesz_eval",
]


def riesz_eval(a: float, r) -> np.ndarray:
    """Evaluate ``V_a(r)``: ``|r|**(-a)`` for ``a > 0``, ``-log|r|`` for ``a = 0``."""
    if not 0.0 <= a < 1.0:
        raise DomainError(f"kernel exponent must satisfy 0 <= a < 1, got {a}")
    r = np.abs(np.asarray(r, dtype=float))
    if np.any(r == 0.0):
        raise SingularityError("V_a is singular at r = 0")
    if a == 0.0:
        return -np.log(r)
    return r ** (-a)


def _riesz_d1(a: float, r: np.ndarray) -> np.ndarray:
    if a == 0.0:
        return -1.0 / r
    return -a * np.sign(r) * np.abs(r) ** (-a - 1.0)


def _riesz_d2(a: float, r: np.ndarray) -> np.ndarray:
    if a == 0.0:
        return 1.0 / r**2
    return a * (a + 1.0) * np.abs(r) ** (-a - 2.0)


# --------------------------------------------------------------------------
# Regular parts


class VReg:
    """Smooth even correction ``V_reg``; subclasses supply ``_eval``."""

    name = "abstract"

    def value(self, r):
        return self._eval(np.asarray(r, dtype=float), 0)

    def d1(self, r):
        return self._eval(np.asarray(r, dtype=float), 1)

    def d2(self, r):
        return self._eval(np.asarray(r, dtype=float), 2)

    def _eval(self, r, order):  # pragma: no cover - interface
        raise NotImplementedError

    def describe(self) -> dict:
        return {"type": self.name}


@dataclass(frozen=True)
class ZeroVReg(VReg):
    name = "zero"

    def _eval(self, r, order):
        return np.zeros_like(r)


# Taylor coefficients of V_reg in powers of t**2 (through t**8)
_DISLOCATION_SERIES = (1.0 - math.log(2.0), 1.0 / 6.0, -1.0 / 60.0, 1.0 / 567.0, -1.0 / 5400.0)


def dislocation_vreg(r, order: int = 0) -> np.ndarray:
    """``V_reg(t) = t coth t - log|2 sinh t| + log|t|`` and its derivatives.

    Uses the degree-8 Taylor expansion for ``|t| < 1e-2`` (value) and
    ``|t| < 2e-2`` (derivatives), and an overflow-free form for large ``|t|``.
    """
    t = np.asarray(r, dtype=float)
    x = np.abs(t)
    out = np.empty_like(x)
    if order == 0:
        small = x < 1e-2
        s2 = x[small] ** 2
        c = _DISLOCATION_SERIES
        out[small] = c[0] + s2 * (c[1] + s2 * (c[2] + s2 * (c[3] + s2 * c[4])))
        y = x[~small]
        em = np.exp(-2.0 * y)
        coth = (1.0 + em) / (1.0 - em)
        out[~small] = y * coth - y - np.log1p(-em) + np.log(y)
        return out
    small = x < 2e-2
    y = x[~small]
    s = x[small]
    s2 = s**2
    em = np.exp(-2.0 * y)
    # 1 / sinh(y)**2 = 4 e^{-2y} / (1 - e^{-2y})**2
    csch2 = 4.0 * em / (1.0 - em) ** 2
    if order == 1:
        out[small] = s * (
            1.0 / 3.0 + s2 * (-1.0 / 15.0 + s2 * (2.0 / 189.0 + s2 * (-1.0 / 675.0 + s2 * 2.0 / 10395.0)))
        )
        out[~small] = -y * csch2 + 1.0 / y
        return np.sign(t) * out
    if order == 2:
        out[small] = 1.0 / 3.0 + s2 * (-1.0 / 5.0 + s2 * (10.0 / 189.0 + s2 * (-7.0 / 675.0 + s2 * 2.0 / 1155.0)))
        coth = (1.0 + em) / (1.0 - em)
        out[~small] = -csch2 + 2.0 * y * coth * csch2 - 1.0 / y**2
        return out
    raise ValueError(f"unsupported derivative order {order}")


@dataclass(frozen=True)
class DislocationVReg(VReg):
    name = "dislocation"

    def _eval(self, r, order):
        return dislocation_vreg(r, order)


@dataclass(frozen=True)
class PolynomialVReg(VReg):
    """``V_reg(r) = sum_k coefficients[k] * r**k`` with only even powers."""

    coefficients: tuple[float, ...]
    name = "polynomial"

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs or not all(math.isfinite(c) for c in coeffs):
            raise DataError("polynomial V_reg needs finite coefficients")
        if any(c != 0.0 for c in coeffs[1::2]):
            raise DataError("polynomial V_reg must be even (odd coefficients zero)")
        object.__setattr__(self, "coefficients", coeffs)

    def _eval(self, r, order):
        p = Polynomial(self.coefficients)
        for _ in range(order):
            p = p.deriv()
        return p(r)

    def describe(self):
        return {"type": self.name, "coefficients": list(self.coefficients)}


class TabulatedVReg(VReg):
    """Even cubic-spline interpolant of tabulated values on ``r >= 0``."""

    name = "tabulated"

    def __init__(self, grid: Sequence[float], values: Sequence[float]):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 4:
            raise DataError("tabulated V_reg needs matching 1-D arrays of length >= 4")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
            raise DataError("tabulated V_reg contains non-finite entries")
        if grid[0] != 0.0 or np.any(np.diff(grid) <= 0.0):
            raise DataError("tabulated grid must start at 0 and increase strictly")
        self.grid = grid
        self.values = values
        full_r = np.concatenate([-grid[:0:-1], grid])
        full_v = np.concatenate([values[:0:-1], values])
        self._spline = CubicSpline(full_r, full_v, bc_type="natural")
        self.r_max = float(grid[-1])

    def _eval(self, r, order):
        if np.any(np.abs(r) > self.r_max * (1.0 + 1e-12)):
            raise DomainError(f"tabulated V_reg only covers |r| <= {self.r_max}")
        return self._spline(r, order)

    def describe(self):
        return {"type": self.name, "grid": self.grid.tolist(), "values": self.values.tolist()}


@dataclass(frozen=True)
class ScaledVReg(VReg):
    """``amplitude * base(length * r) + offset``."""

    base: VReg
    length: float = 1.0
    amplitude: float = 1.0
    offset: float = 0.0
    name = "scaled"

    def _eval(self, r, order):
        out = self.amplitude * self.length**order * self.base._eval(self.length * r, order)
        if order == 0:
            out = out + self.offset
        return out

    def describe(self):
        return {
            "type": self.name,
            "base": self.base.describe(),
            "length": self.length,
            "amplitude": self.amplitude,
            "offset": self.offset,
        }


def _make_vreg(spec) -> VReg:
    if isinstance(spec, VReg):
        return spec
    if spec is None or spec == "zero":
        return ZeroVReg()
    if spec == "dislocation":
        return DislocationVReg()
    raise DataError(f"unknown regular part {spec!r}")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel ``V = V_a + V_reg`` with ``0 <= a < 1``."""

    a: float
    vreg: VReg = field(default_factory=ZeroVReg)

    def __post_init__(self):
        a = float(self.a)
        if not math.isfinite(a) or not 0.0 <= a < 1.0:
            raise DomainError(f"kernel exponent must satisfy 0 <= a < 1, got {self.a}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "vreg", _make_vreg(self.vreg))

    @property
    def is_log(self) -> bool:
        return self.a == 0.0

    @property
    def blowup_exponent(self) -> float:
        """``(1 - a)/2``: density blows up like ``dist**(-(1-a)/2)`` at a barrier."""
        return 0.5 * (1.0 - self.a)

    def singular(self, r):
        return riesz_eval(self.a, r)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return riesz_eval(self.a, r) + self.vreg.value(r)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        return _riesz_d1(self.a, r) + self.vreg.d1(r)

    def second_derivative(self, r):
        r = np.asarray(r, dtype=float)
        return _riesz_d2(self.a, r) + self.vreg.d2(r)

    def normalising_shift(self, r0: float = 1.0, b: float | None = None) -> float:
        """Constant ``c`` with ``V(r0) + c = -V'(r0) (b - r0)``.

        For ``b = 2 r0 = 2`` this is the normalisation ``V(1) = -V'(1)``.
        """
        if b is None:
            b = 2.0 * r0
        v = float(self.value(r0))
        d = float(self.derivative(r0))
        return -v - d * (b - r0)

    def describe(self) -> dict:
        return {"a": self.a, "vreg": self.vreg.describe()}


# --------------------------------------------------------------------------
# Potentials


@dataclass(frozen=True)
class PotentialSpec:
    """Polynomial external potential with barriers ``s1 <= t <= s2``."""

    coefficients: tuple[float, ...] = (0.0,)
    barriers: tuple[float, float] = (-math.inf, math.inf)
    form: str = "polynomial"

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients) or (0.0,)
        if not all(math.isfinite(c) for c in coeffs):
            raise DataError("potential coefficients must be finite")
        s1, s2 = (float(s) for s in self.barriers)
        if math.isnan(s1) or math.isnan(s2) or not s1 < s2:
            raise DataError(f"barriers must satisfy s1 < s2, got {self.barriers}")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "barriers", (s1, s2))

    @classmethod
    def zero(cls, barriers=(-math.inf, math.inf)):
        return cls((0.0,), barriers, "zero")

    @classmethod
    def affine(cls, gamma: float, barriers=(-math.inf, math.inf), offset: float = 0.0):
        return cls((offset, gamma), barriers, "affine")

    @classmethod
    def quadratic(cls, coefficients, barriers=(-math.inf, math.inf)):
        coefficients = tuple(coefficients)
        if len(coefficients) > 3:
            raise DataError("quadratic potential takes at most three coefficients")
        return cls(coefficients, barriers, "quadratic")

    @classmethod
    def polynomial(cls, coefficients, barriers=(-math.inf, math.inf)):
        return cls(tuple(coefficients), barriers, "polynomial")

    @property
    def poly(self) -> Polynomial:
        return Polynomial(self.coefficients)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def value(self, t):
        return self.poly(np.asarray(t, dtype=float))

    def derivative(self, t):
        return self.poly.deriv()(np.asarray(t, dtype=float))

    def second_derivative(self, t):
        return self.poly.deriv(2)(np.asarray(t, dtype=float))

    def composed(self, length: float, shift: float, amplitude: float = 1.0) -> "PotentialSpec":
        """Return ``amplitude * U(length * x + shift)`` with barriers mapped back."""
        p = amplitude * self.poly(Polynomial([shift, length]))
        s1, s2 = self.barriers
        return PotentialSpec(tuple(p.coef), ((s1 - shift) / length, (s2 - shift) / length), self.form)

    def describe(self) -> dict:
        return {"form": self.form, "coefficients": list(self.coefficients), "barriers": list(self.barriers)}


# --------------------------------------------------------------------------
# Structural checks


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    passed: bool
    value: float
    detail: str = ""


@dataclass(frozen=True)
class AssumptionReport:
    case: str
    checks: tuple[AssumptionCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def require(self, ignore: Sequence[str] = ()):
        """Raise :class:`PreconditionError` unless every check outside ``ignore`` passes."""
        bad = [c for c in self.checks if not c.passed and c.name not in ignore]
        if bad:
            details = "; ".join(f"{c.name}: {c.detail}" for c in bad)
            raise PreconditionError(f"assumptions fail for {self.case}: {details}")
        return self

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "value": c.value, "detail": c.detail}
                for c in self.checks
            ],
        }


def _blowup_ratio(kernel: KernelSpec, n_radii: int = 20) -> float:
    """``min_k inf_{0<s<r_k} V''(s) * r_k**(2+a)`` over dyadic radii ``r_k``."""
    worst = math.inf
    for k in range(1, n_radii + 1):
        r = 2.0**-k
        s = r * 2.0 ** (-np.arange(0, 161) / 8.0)
        ratio = float(np.min(kernel.second_derivative(s))) * r ** (2.0 + kernel.a)
        worst = min(worst, ratio)
    return worst


def check_assumptions(
    kernel: KernelSpec,
    potential: PotentialSpec,
    case: str,
    n_grid: int = 2**12,
    reach: float = 4.0,
) -> AssumptionReport:
    """Sample the structural hypotheses behind the solvers.

    ``case="fixed_interval"`` assumes the problem is posed on ``[0, 1]``.
    ``case="free_boundary"`` samples the kernel on ``(0, reach]`` and the
    potential on the barrier interval clipped to ``[-reach, reach]``.
    """
    if case not in ("fixed_interval", "free_boundary"):
        raise ValueError(f"unknown case {case!r}")
    tol = 1e-10
    checks = []
    r_max = 1.0 if case == "fixed_interval" else reach
    r = np.linspace(r_max / n_grid, r_max, n_grid)
    checks.append(AssumptionCheck("kernel_exponent", 0.0 <= kernel.a < 1.0, kernel.a, "0 <= a < 1"))

    vr = kernel.vreg.value(r)
    asym = float(np.max(np.abs(vr - kernel.vreg.value(-r))))
    scale = 1.0 + float(np.max(np.abs(vr)))
    checks.append(AssumptionCheck("vreg_even", asym <= 1e-12 * scale, asym, "max |V_reg(r) - V_reg(-r)|"))

    min_d2 = float(np.min(kernel.second_derivative(r)))
    checks.append(AssumptionCheck("kernel_convex", min_d2 >= -tol, min_d2, "min V'' on the sample"))

    ratio = _blowup_ratio(kernel)
    checks.append(
        AssumptionCheck("kernel_blowup", ratio > 0.0, ratio, "min inf_{s<r} V''(s) r^(2+a) at dyadic r")
    )

    if case == "fixed_interval":
        d1 = float(kernel.derivative(1.0))
        checks.append(
            AssumptionCheck(
                "kernel_normalisable", d1 <= 0.0, d1, "V'(1) <= 0 so that V(1) = -V'(1) >= 0 after a shift"
            )
        )
        t = np.linspace(0.0, 1.0, n_grid)
        u = potential.value(t)
        checks.append(AssumptionCheck("potential_finite", bool(np.all(np.isfinite(u))), float(np.min(u)), ""))
        u2 = float(np.min(potential.second_derivative(t)))
        checks.append(AssumptionCheck("potential_convex", u2 >= -tol, u2, "min U'' on [0, 1]"))
        slope = float(np.max(np.abs(potential.derivative(t))))
        checks.append(
            AssumptionCheck(
                "potential_slope", slope <= abs(d1) + tol, slope, f"sup |U'| <= |V'(1)| = {abs(d1):.6g}"
            )
        )
    else:
        d1 = kernel.derivative(r)
        worst = float(np.max(d1))
        checks.append(AssumptionCheck("kernel_repulsive", worst <= tol, worst, "max V' on the sample"))
        s1, s2 = potential.barriers
        lo, hi = max(s1, -reach), min(s2, reach)
        if not lo < hi:
            lo, hi = s1, s1 + reach
        t = np.linspace(lo, hi, n_grid)
        u2 = float(np.min(potential.second_derivative(t)))
        checks.append(AssumptionCheck("potential_convex", u2 >= -tol, u2, f"min U'' on [{lo:.3g}, {hi:.3g}]"))
        slopes = []
        if math.isinf(s2):
            slopes.append(float(potential.derivative(hi)))
        if math.isinf(s1):
            slopes.append(-float(potential.derivative(lo)))
        growth = min(slopes) if slopes else math.inf
        checks.append(
            AssumptionCheck("potential_growth", growth > 0.0, growth, "U grows at least linearly on unbounded sides")
        )
    return AssumptionReport(case, tuple(checks))


# --------------------------------------------------------------------------
# Fourier transform of the compactly extended kernel


@dataclass(frozen=True)
class KernelFourier:
    """Cosine transform of the even, convex, compactly supported extension."""

    omegas: np.ndarray
    values: np.ndarray
    shift: float
    b: float
    r0: float
    a: float

    @property
    def weighted(self) -> np.ndarray:
        return self.values * (1.0 + self.omegas**2) ** (0.5 * (1.0 - self.a))

    @property
    def positive(self) -> bool:
        return bool(np.all(self.values > 0.0))

    @property
    def band(self) -> tuple[float, float]:
        w = self.weighted
        return float(np.min(w)), float(np.max(w))

    @property
    def band_ratio(self) -> float:
        lo, hi = self.band
        return hi / lo if lo > 0.0 else math.inf


def _panel_cosine(fun, lo, hi, omega, n_panels, rule):
    edges = np.linspace(lo, hi, n_panels + 1)
    h = np.diff(edges)
    t = edges[:-1, None] + h[:, None] * rule.nodes[None, :]
    w = h[:, None] * rule.weights[None, :]
    return float(np.sum(w * fun(t) * np.cos(2.0 * np.pi * omega * t)))


def kernel_fourier(
    kernel: KernelSpec,
    b: float = 2.0,
    omega_grid=None,
    r0: float = 1.0,
    n_nodes: int = 20,
) -> KernelFourier:
    """Samples of ``V_hat(omega) = int V_ext(t) cos(2 pi omega t) dt``.

    ``V_ext`` equals ``V + c`` on ``[-r0, r0]``, is linear on ``r0 <= |t| <= b``
    and vanishes beyond ``b``; the shift ``c`` makes the tangent at ``r0`` hit
    zero exactly at ``b``, so the extension is even, convex and continuous.
    For ``b = r0`` the kernel is simply truncated.
    """
    if b < r0:
        raise DomainError(f"support half-width b={b} must be at least r0={r0}")
    if omega_grid is None:
        omega_grid = np.linspace(0.0, 100.0, 1001)
    omegas = np.abs(np.asarray(omega_grid, dtype=float))
    if not np.all(np.isfinite(omegas)):
        raise DomainError("frequency grid must be finite")
    d0 = float(kernel.derivative(r0))
    if b > r0 and d0 > 0.0:
        raise PreconditionError("V'(r0) > 0: no convex decreasing extension exists")
    c = kernel.normalising_shift(r0, b)
    v0 = float(kernel.value(r0)) + c
    leg = gauss_legendre(n_nodes)
    if kernel.is_log:
        sing = gauss_jacobi_log(n_nodes, 0.0)
    else:
        sing = gauss_jacobi(n_nodes, -kernel.a, 0.0)

    def smooth_part(t):
        return kernel.vreg.value(t) + c

    values = np.empty_like(omegas)
    for i, om in enumerate(omegas):
        n_pan = max(2, int(math.ceil(2.0 * r0 * (om + 1.0))))
        h = r0 / n_pan
        cosk = lambda t: np.cos(2.0 * np.pi * om * t)  # noqa: E731
        # first panel: singular weight handled by the Gauss rule
        if kernel.is_log:
            first = h * (-math.log(h) * np.dot(leg.weights, cosk(h * leg.nodes)) + np.dot(sing.weights, cosk(h * sing.nodes)))
        else:
            first = h ** (1.0 - kernel.a) * np.dot(sing.weights, cosk(h * sing.nodes))
        first += h * np.dot(leg.weights, smooth_part(h * leg.nodes) * cosk(h * leg.nodes))
        rest = _panel_cosine(lambda t: kernel.value(t) + c, h, r0, om, n_pan - 1, leg)
        total = first + rest
        if b > r0:
            n_lin = max(2, int(math.ceil(2.0 * (b - r0) * (om + 1.0))))
            total += _panel_cosine(lambda t: v0 + d0 * (t - r0), r0, b, om, n_lin, leg)
        values[i] = 2.0 * total
    return KernelFourier(omegas, values, c, float(b), float(r0), kernel.a)
