"""Exception types raised across the package."""

from __future__ import annotations

__all__ = [
    "OscillatorError",
    "DomainError",
    "BracketError",
    "DivergenceError",
    "NoMotionError",
    "DegenerateOrbitError",
    "SingularFieldError",
    "EvaluationError",
    "ConvergenceError",
    "StiffnessError",
    "UnsupportedError",
]


class OscillatorError(Exception):
    """Base class for every error raised by this package."""


class DomainError(OscillatorError, ValueError):
    """An argument lies outside the domain of the requested function."""


class BracketError(DomainError):
    """The supplied interval does not bracket a sign change."""


class EvaluationError(OscillatorError, ArithmeticError):
    """A user callable returned a non-finite value.

    ``last_state`` holds the last finite state (or abscissa) seen, when known.
    """

    def __init__(self, message: str, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class ConvergenceError(OscillatorError, ArithmeticError):
    """An iterative method exhausted its budget before meeting tolerance.

    The best available estimate travels with the exception as ``best``.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class StiffnessError(OscillatorError, ArithmeticError):
    """Step size underflow in the ODE integrator (or a near-singular field)."""

    def __init__(self, message: str, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class DivergenceError(DomainError):
    """The requested integral diverges (e.g. K(k) at k = 1)."""


class NoMotionError(DomainError):
    """The (E, J) pair admits no classical trajectory."""


class DegenerateOrbitError(DomainError):
    """Circle or segment orbit passed where an annulus orbit is required."""


class SingularFieldError(DomainError):
    """Zero angular momentum: the Hamiltonian vector field hits p = 0."""


class UnsupportedError(OscillatorError, NotImplementedError):
    """Requested case is not solved in closed form (l != 0)."""
