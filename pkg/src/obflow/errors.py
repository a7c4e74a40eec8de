from __future__ import annotations

from typing import Any


class ObflowError(Exception):
    """Base class for every error raised by obflow."""


class ConfigurationError(ObflowError, ValueError):
    """Invalid parameters, grids or tolerances."""


class DegenerateLambda(ObflowError, ValueError):
    """Relaxation time too small for the two-mode root formulas."""


class NonRealResult(ObflowError, ArithmeticError):
    """A bracket that must be real came out with a significant imaginary part."""


class UnsupportedOrder(ObflowError, ValueError):
    """Requested iterated erfc order is outside {0, 1, 2}."""


class NonFiniteIntegrand(ObflowError, ArithmeticError):
    """The integrand returned inf or nan at a quadrature node."""


class StencilOutOfDomain(ObflowError, ValueError):
    """A finite-difference stencil would leave the y >= 0, t >= 0 quadrant."""


class OutsideAsymptoticRegime(ObflowError, ValueError):
    """Small-parameter approximation requested where beta is not small."""


class QuadratureFailure(ObflowError):
    """
    A quadrature did not reach its tolerance.

    Keyword context (quantity, y, t, err_estimate, ...) is kept on ``context``
    and rendered into the message.
    """

    def __init__(self, message: str, **context: Any) -> None:
        self.context = {k: v for k, v in context.items() if v is not None}
        details = ", ".join(f"{k}={v!r}" for k, v in self.context.items())
        super().__init__(f"{message} ({details})" if details else message)


__all__ = [
    "ObflowError",
    "ConfigurationError",
    "DegenerateLambda",
    "NonRealResult",
    "UnsupportedOrder",
    "NonFiniteIntegrand",
    "StencilOutOfDomain",
    "OutsideAsymptoticRegime",
    "QuadratureFailure",
]
