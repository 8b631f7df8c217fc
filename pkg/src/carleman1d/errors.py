"""Exception types raised by the solver stack."""


class Carleman1DError(Exception):
    """Base class for all package errors."""


class DomainError(Carleman1DError, ValueError):
    """An argument lies outside the domain of a special function."""


class DataError(Carleman1DError, ValueError):
    """Input data (tables, coefficients, configurations) are malformed."""


class SingularityError(Carleman1DError, ValueError):
    """A weight or kernel exponent makes the requested integral divergent."""


class UnsupportedWeightError(Carleman1DError, ValueError):
    """No closed form is available for the requested weight exponents."""


class PreconditionError(Carleman1DError, ValueError):
    """Structural assumptions on the kernel or potential fail."""


class ConditioningError(Carleman1DError, RuntimeError):
    """A discretised linear system is too ill-conditioned to trust."""


class ConvergenceError(Carleman1DError, RuntimeError):
    """An iterative method failed to meet its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SolutionRejectedError(Carleman1DError, RuntimeError):
    """A computed solution violates a structural check."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
