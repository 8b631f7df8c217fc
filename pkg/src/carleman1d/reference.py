"""Closed-form equilibrium densities for ``V_reg = 0``.

Each case carries its kernel, potential and solver mode, so it can be
re-solved numerically and compared against the formula.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DataError, DomainError
from .kernels import KernelSpec, PotentialSpec
from .singular_ops import WeightedFunction
from .specfun import gamma

__all__ = [
    "ClosedFormCase",
    "REFERENCE_NAMES",
    "head_louat_halfline",
    "head_louat_halfline_case",
    "head_louat_interval",
    "head_louat_interval_case",
    "hco_endpoint",
    "hco_pileup",
    "reference_case",
    "riesz_no_field",
    "riesz_no_field_case",
    "semicircle",
]


@dataclass(frozen=True)
class ClosedFormCase:
    """A problem together with its exact minimiser and constant."""

    name: str
    a: float
    kernel: KernelSpec
    potential: PotentialSpec
    mode: str
    support: tuple[float, float]
    constant_C: float
    representation: WeightedFunction = field(repr=False)
    params: dict = field(default_factory=dict)

    @property
    def t1(self) -> float:
        return self.support[0]

    @property
    def t2(self) -> float:
        return self.support[1]

    def density(self, t) -> np.ndarray:
        """Formula value; zero outside the support."""
        return self.representation(np.asarray(t, dtype=float))

    __call__ = density

    def cdf(self, t) -> np.ndarray:
        return self.representation.cdf(t)

    def mass(self) -> float:
        return self.representation.integral()

    def describe(self) -> dict:
        return {
            "name": self.name,
            "a": self.a,
            "mode": self.mode,
            "support": list(self.support),
            "C": self.constant_C,
            "potential": self.potential.describe(),
            **self.params,
        }


def _check_open(t, lo, hi, what):
    t = np.asarray(t, dtype=float)
    if np.any((t <= lo) | (t >= hi)) or not np.all(np.isfinite(t)):
        raise DomainError(f"{what} is defined on the open interval ({lo}, {hi})")
    return t


def _check_exponent(a):
    a = float(a)
    if not 0.0 < a < 1.0:
        raise DomainError(f"exponent must satisfy 0 < a < 1, got {a}")
    return a


def head_louat_interval(t) -> np.ndarray:
    """Arcsine density ``1/(pi sqrt(t(1-t)))`` on (0, 1): log kernel, no field."""
    t = _check_open(t, 0.0, 1.0, "head_louat_interval")
    return 1.0 / (math.pi * np.sqrt(t * (1.0 - t)))


def head_louat_halfline(t) -> np.ndarray:
    """``(1/pi) sqrt((2-t)/t)`` on (0, 2): log kernel, ``U(t) = t`` with a barrier at 0."""
    t = _check_open(t, 0.0, 2.0, "head_louat_halfline")
    return np.sqrt((2.0 - t) / t) / math.pi


def _riesz_prefactor(a):
    return a * gamma(a) / gamma(0.5 * (1.0 + a)) ** 2


def riesz_no_field(a: float, t):
    """Density and constant for ``V = |r|**-a`` on [0, 1] without a field."""
    a = _check_exponent(a)
    t = _check_open(t, 0.0, 1.0, "riesz_no_field")
    pref = _riesz_prefactor(a)
    value = pref * (t * (1.0 - t)) ** (-0.5 * (1.0 - a))
    constant = pref * math.pi / math.cos(0.5 * a * math.pi)
    return value, constant


def hco_endpoint(a: float, gamma_: float) -> float:
    """Right endpoint of the pile-up under the field ``gamma t`` with a barrier at 0."""
    a = _check_exponent(a)
    c = math.cos(0.5 * a * math.pi)
    inner = gamma_ / (2.0 * math.pi) * c / (a * a * gamma(a)) * gamma(0.5 * (1.0 + a)) ** 2
    return inner ** (-1.0 / (1.0 + a))


def hco_pileup(a: float, gamma_: float = 1.0) -> ClosedFormCase:
    """Riesz kernel, ``U(t) = gamma t`` with a barrier at 0.

    ``rho(t) = gamma cos(a pi/2)/(pi a) (t2 - t)**((1+a)/2) t**(-(1-a)/2)`` and
    ``C = (1+a) gamma t2 / (2a)``.
    """
    a = _check_exponent(a)
    gamma_ = float(gamma_)
    if not gamma_ > 0.0 or not math.isfinite(gamma_):
        raise DomainError(f"field strength must be positive, got {gamma_}")
    t2 = hco_endpoint(a, gamma_)
    b = 0.5 * (1.0 - a)
    pref = gamma_ * math.cos(0.5 * a * math.pi) / (math.pi * a)
    rep = WeightedFunction((0.0, t2), (-b, 0.5 * (1.0 + a)), np.full(64, pref))
    return ClosedFormCase(
        "hco-pileup",
        a,
        KernelSpec(a),
        PotentialSpec.affine(gamma_, (0.0, math.inf)),
        "free_boundary",
        (0.0, t2),
        (1.0 + a) * gamma_ * t2 / (2.0 * a),
        rep,
        {"gamma": gamma_},
    )


def head_louat_interval_case() -> ClosedFormCase:
    rep = WeightedFunction((0.0, 1.0), (-0.5, -0.5), np.full(64, 1.0 / math.pi))
    return ClosedFormCase(
        "head-louat-interval",
        0.0,
        KernelSpec(0.0),
        PotentialSpec.zero((0.0, 1.0)),
        "fixed_interval",
        (0.0, 1.0),
        2.0 * math.log(2.0),
        rep,
    )


def head_louat_halfline_case() -> ClosedFormCase:
    # C = h(0) = int -log(s) rho(s) ds = 1 + log 2 (Beta-function derivative)
    rep = WeightedFunction((0.0, 2.0), (-0.5, 0.5), np.full(64, 1.0 / math.pi))
    return ClosedFormCase(
        "head-louat-halfline",
        0.0,
        KernelSpec(0.0),
        PotentialSpec.affine(1.0, (0.0, math.inf)),
        "free_boundary",
        (0.0, 2.0),
        1.0 + math.log(2.0),
        rep,
    )


def riesz_no_field_case(a: float = 0.5) -> ClosedFormCase:
    a = _check_exponent(a)
    b = 0.5 * (1.0 - a)
    pref = _riesz_prefactor(a)
    rep = WeightedFunction((0.0, 1.0), (-b, -b), np.full(64, pref))
    return ClosedFormCase(
        "riesz-no-field",
        a,
        KernelSpec(a),
        PotentialSpec.zero((0.0, 1.0)),
        "fixed_interval",
        (0.0, 1.0),
        pref * math.pi / math.cos(0.5 * a * math.pi),
        rep,
        {"a": a},
    )


def semicircle(kappa: float = 1.0) -> ClosedFormCase:
    """Log kernel with ``U(t) = kappa t**2`` and no barriers.

    The minimiser is ``2/(pi R**2) sqrt(R**2 - t**2)`` with ``R = kappa**-1/2``
    and ``C = 1/2 - log(R/2)``; ``kappa = 1/2`` gives ``(1/pi) sqrt(2 - t**2)``.
    """
    kappa = float(kappa)
    if not kappa > 0.0 or not math.isfinite(kappa):
        raise DomainError(f"quadratic coefficient must be positive, got {kappa}")
    radius = 1.0 / math.sqrt(kappa)
    # (R^2 - t^2)^(1/2) = (t + R)^(1/2) (R - t)^(1/2)
    rep = WeightedFunction((-radius, radius), (0.5, 0.5), np.full(64, 2.0 / (math.pi * radius**2)))
    return ClosedFormCase(
        "semicircle",
        0.0,
        KernelSpec(0.0),
        PotentialSpec.quadratic((0.0, 0.0, kappa)),
        "free_boundary",
        (-radius, radius),
        0.5 - math.log(0.5 * radius),
        rep,
        {"kappa": kappa},
    )


_FACTORIES: dict[str, tuple[Callable[..., ClosedFormCase], dict]] = {
    "head-louat-interval": (head_louat_interval_case, {}),
    "head-louat-halfline": (head_louat_halfline_case, {}),
    "riesz-no-field": (riesz_no_field_case, {"a": 0.5}),
    "hco-pileup": (hco_pileup, {"a": 0.5, "gamma": 1.0}),
    "semicircle": (semicircle, {"kappa": 1.0}),
}

REFERENCE_NAMES = tuple(_FACTORIES)


def reference_case(name: str) -> ClosedFormCase:
    """Look up a case by name, e.g. ``"riesz-no-field a=0.25"`` or ``"hco-pileup a=0.5 gamma=2"``."""
    parts = str(name).split()
    if not parts or parts[0] not in _FACTORIES:
        raise DataError(f"unknown reference case {name!r}; known: {', '.join(REFERENCE_NAMES)}")
    factory, defaults = _FACTORIES[parts[0]]
    params = dict(defaults)
    for token in parts[1:]:
        m = re.fullmatch(r"([A-Za-z_]+)=([-+0-9.eE]+)", token)
        if not m or m.group(1) not in defaults:
            raise DataError(f"bad parameter {token!r} for reference case {parts[0]!r}")
        try:
            params[m.group(1)] = float(m.group(2))
        except ValueError:
            raise DataError(f"bad parameter {token!r} for reference case {parts[0]!r}") from None
    if parts[0] == "hco-pileup":
        return hco_pileup(params["a"], params["gamma"])
    return factory(**params)
