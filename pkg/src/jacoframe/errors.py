"""Exception hierarchy shared by all jacoframe modules.

The CLI maps these onto exit codes: bad inputs and violated preconditions
(:class:`InputError`, :class:`ParameterError`, :class:`CapacityError`,
:class:`InsufficientDataError`) exit with 2, numerical failures
(:class:`NumericalError` and subclasses) exit with 1.
"""

from __future__ import annotations


class JacoframeError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(JacoframeError, ValueError):
    """A parameter violates a documented precondition."""


class CapacityError(JacoframeError, ValueError):
    """A request exceeds the degree capacity of a recurrence table or
    coefficient vector."""


class InputError(JacoframeError, ValueError):
    """User-supplied data (point sets, files) is malformed."""


class InsufficientDataError(JacoframeError, ValueError):
    """Not enough usable data to perform a fit."""


class NumericalError(JacoframeError, RuntimeError):
    """A numerical procedure failed."""


class SolverError(NumericalError):
    """The iterative solver did not reach the requested tolerance.

    Carries the residual history for post-mortem inspection.
    """

    def __init__(self, message: str, residual_history=None):
        super().__init__(message)
        self.residual_history = list(residual_history) if residual_history is not None else []


class RankDeficiencyError(NumericalError):
    """The Gram matrix is numerically singular (negative curvature in CG)."""
