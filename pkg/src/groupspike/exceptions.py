"""Custom exceptions for groupspike.

Two families sit under :class:`GroupSpikeError`. :class:`InputError` covers bad
user input (shapes, files, names) and maps to CLI exit code 2.
:class:`NumericalError` covers failures inside samplers and solvers and maps to
exit code 3.
"""

from __future__ import annotations

from typing import Optional


class GroupSpikeError(Exception):
    """Base exception for groupspike."""

    def __init__(self, message: str, suggestion: str = ""):
        super().__init__(message)
        self.message = message
        self.suggestion = suggestion

    def __str__(self) -> str:
        if self.suggestion:
            return f"{self.message}\nSuggestion: {self.suggestion}"
        return self.message


class InputError(GroupSpikeError):
    """Invalid input supplied by the caller."""

    pass


class DimensionMismatch(InputError):
    """Array shapes or group sizes disagree."""

    pass


class NonFiniteInput(InputError):
    """NaN or infinite entries in a design or response."""

    pass


class IndexOutOfRange(InputError, IndexError):
    """Group or coefficient index outside the valid range."""

    pass


class ParseError(InputError):
    """A data file could not be parsed."""

    def __init__(
        self,
        message: str,
        suggestion: str = "",
        row: Optional[int] = None,
        column: Optional[int] = None,
    ):
        super().__init__(message, suggestion)
        self.row = row
        self.column = column


class MissingValue(ParseError):
    """A data file contains an empty or NA cell."""

    pass


class ConfigurationError(InputError):
    """Error in configuration."""

    pass


class UnknownMethod(InputError):
    """Method name is not registered."""

    pass


class UnknownExample(InputError):
    """Simulation example id is not defined."""

    pass


class InsufficientData(InputError):
    """Too few observations for the requested operation."""

    pass


class InsufficientReplications(InputError):
    """Too few replications to aggregate."""

    pass


class NumericalError(GroupSpikeError):
    """Failure inside a sampler or solver."""

    pass


class InvalidParameter(NumericalError, ValueError):
    """Distribution or model parameter outside its support."""

    pass


class NotPositiveDefinite(NumericalError):
    """Cholesky factorisation failed."""

    pass


class SingularCovariance(NotPositiveDefinite):
    """A conditional covariance could not be factorised."""

    pass


class DegenerateEstimate(NumericalError):
    """Monte Carlo EM produced an unusable estimate."""

    pass


class MaxIterationsExceeded(NumericalError):
    """Iterative solver hit its sweep cap before converging."""

    pass


class RankDeficient(NumericalError):
    """Least squares problem has no unique solution."""

    pass


class EmptyChain(NumericalError):
    """No stored draws to summarise."""

    pass
