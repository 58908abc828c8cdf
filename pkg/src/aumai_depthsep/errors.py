"""Exception hierarchy for aumai-depthsep.

Every error raised by the package derives from :class:`DepthSepError` and from
the builtin a caller would expect for the same situation (``ValueError`` for
bad input, ``RuntimeError`` for limits hit while computing).
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from aumai_depthsep.models import Certificate

__all__ = [
    "DepthSepError",
    "ShapeError",
    "DomainError",
    "InputError",
    "PreconditionError",
    "NormalizationError",
    "DegenerateInputError",
    "ConfigError",
    "BudgetExceededError",
    "CapabilityError",
    "NumericError",
]


class DepthSepError(Exception):
    """Base class for all aumai-depthsep errors."""


class ShapeError(DepthSepError, ValueError):
    """Array or vector dimensions do not match."""


class DomainError(DepthSepError, ValueError):
    """A parameter lies outside the domain where an operation is defined."""


class InputError(DepthSepError, ValueError):
    """A user-supplied function produced unusable values (NaN, inf)."""


class PreconditionError(DepthSepError, ValueError):
    """A documented precondition of an operation does not hold."""


class NormalizationError(PreconditionError):
    """A network violates the normalisation a compiler requires.

    The message always says which quantity to rescale.
    """


class DegenerateInputError(DepthSepError, ValueError):
    """The input makes the requested quantity undefined (e.g. a zero norm)."""


class ConfigError(DepthSepError, ValueError):
    """A configuration document failed validation.

    Args:
        message: Human readable description.
        path: Dotted path of the offending field, if known.
    """

    def __init__(self, message: str, path: str = "") -> None:
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class BudgetExceededError(DepthSepError, RuntimeError):
    """A construction would exceed the caller's atom or unit cap.

    The certificate computed before giving up is attached so callers can
    still report the closed-form budgets.

    Args:
        message: Human readable description.
        certificate: The (partial) certificate, when one was computed.
    """

    def __init__(self, message: str, certificate: Certificate | None = None) -> None:
        self.certificate = certificate
        super().__init__(message)


class CapabilityError(DepthSepError, RuntimeError):
    """The request is valid but outside what this implementation supports."""


class NumericError(DepthSepError, RuntimeError):
    """A numerical procedure did not reach its tolerance.

    Args:
        message: Human readable description.
        achieved: The tolerance that was actually reached.
    """

    def __init__(self, message: str, achieved: float = float("nan")) -> None:
        self.achieved = achieved
        super().__init__(f"{message} (achieved tolerance {achieved:.3g})")
