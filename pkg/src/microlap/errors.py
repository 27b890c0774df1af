"""Typed errors raised by the library.

Every domain error derives from :class:`MicrolapError`; the command line
maps those to exit status 1.
"""

from __future__ import annotations


class MicrolapError(Exception):
    """Base class for domain errors."""


class PreconditionError(MicrolapError, ValueError):
    """An input violates a documented precondition."""


class MixedTermsError(MicrolapError):
    """A plain power series was expected but logs or fractional exponents occur."""


class IrregularAtInfinity(MicrolapError):
    """The operator does not have a regular singularity at infinity."""


class NonRationalSingularity(MicrolapError):
    """The leading coefficient has roots outside the rationals."""


class IrrationalExponent(MicrolapError):
    """A local exponent is not rational."""


class NotRegularSingular(MicrolapError):
    """Fuchs' criterion fails at the requested point."""


class TruncationExhausted(MicrolapError):
    """The kernel dimension stayed deficient after all truncation retries."""


class DimensionMismatch(MicrolapError):
    """A computed dimension disagrees with its theoretical value."""


class OrderTooLarge(MicrolapError):
    """Requested derivative order exceeds the supported cap."""


class PoleAtNonpositiveInteger(MicrolapError):
    """Gamma is evaluated at one of its poles."""


class UnsupportedSeries(MicrolapError):
    """The series shape is outside what the numeric routine handles."""


class IllConditioned(MicrolapError):
    """A numeric matrix is too badly conditioned to be trusted."""

    def __init__(self, message: str, condition: float | None = None):
        super().__init__(message)
        self.condition = condition


class AntiStokesDirection(MicrolapError):
    """The summation direction is an anti-Stokes direction."""


class TailBoundExceeded(MicrolapError):
    """A truncated integral tail is larger than the tolerance."""


class PathTooCloseToSingularity(MicrolapError):
    """A continuation path passes too close to a singular point."""


class StepLimitExceeded(MicrolapError):
    """Analytic continuation needed more steps than allowed."""


class ParseError(MicrolapError):
    """Malformed operator expression."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NonIntegerExponentOnDz(ParseError):
    """A power of the derivation is not a non-negative integer."""
