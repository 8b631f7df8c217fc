"""Equilibrium densities of one-dimensional nonlocal interaction energies.

The minimiser of ``E(rho) = 1/2 int int V(t - s) drho drho + int U drho`` with
``V = V_a + V_reg`` is computed by inverting the weakly singular equation
``V_a * rho = f`` with the explicit Carleman operator, and free support
endpoints are located by a nested root-find.
"""

from .carleman import CarlemanOperator, CarlemanSolution, carleman_apply, carleman_polynomial, verify_residual
from .equilibrium import (
    EquilibriumSolution,
    Normalisation,
    WeightedDensity,
    affine_rescale,
    energy,
    energy_fourier,
    h_function,
    solve_fixed_interval,
    solve_free_boundary,
)
from .errors import (
    Carleman1DError,
    ConditioningError,
    ConvergenceError,
    DataError,
    DomainError,
    PreconditionError,
    SingularityError,
    SolutionRejectedError,
    UnsupportedWeightError,
)
from .kernels import KernelSpec, PotentialSpec, check_assumptions, dislocation_vreg, kernel_fourier, riesz_eval
from .particles import ParticleConfiguration, compare_to_density, discrete_energy, minimize_particles
from .reference import ClosedFormCase, hco_pileup, head_louat_halfline, head_louat_interval, reference_case, riesz_no_field
from .singular_ops import (
    WeightedFunction,
    finite_hilbert,
    fractional_derivative,
    fractional_integral,
    hilbert_of_weight,
    kernel_convolution,
)
from .specfun import QuadratureRule, beta_moment, gamma, gauss_jacobi

__version__ = "0.1.0"

__all__ = [
    "CarlemanOperator",
    "CarlemanSolution",
    "Carleman1DError",
    "ClosedFormCase",
    "ConditioningError",
    "ConvergenceError",
    "DataError",
    "DomainError",
    "EquilibriumSolution",
    "KernelSpec",
    "Normalisation",
    "ParticleConfiguration",
    "PotentialSpec",
    "PreconditionError",
    "QuadratureRule",
    "SingularityError",
    "SolutionRejectedError",
    "UnsupportedWeightError",
    "WeightedDensity",
    "WeightedFunction",
    "affine_rescale",
    "beta_moment",
    "carleman_apply",
    "carleman_polynomial",
    "check_assumptions",
    "compare_to_density",
    "discrete_energy",
    "dislocation_vreg",
    "energy",
    "energy_fourier",
    "finite_hilbert",
    "fractional_derivative",
    "fractional_integral",
    "gamma",
    "gauss_jacobi",
    "h_function",
    "hco_pileup",
    "head_louat_halfline",
    "head_louat_interval",
    "hilbert_of_weight",
    "kernel_convolution",
    "kernel_fourier",
    "minimize_particles",
    "reference_case",
    "riesz_eval",
    "riesz_no_field",
    "solve_fixed_interval",
    "solve_free_boundary",
    "verify_residual",
]
