"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """A parameter lies outside the range where an operation is defined."""


class InputError(ValueError):
    """Malformed input: wrong shape, non-finite samples, bad config values."""


class EvaluationError(ArithmeticError):
    """A special-function evaluation did not converge.

    The offending parameters are kept on the instance so callers can
    report them.
    """

    def __init__(self, message: str, **params):
        self.params = params
        detail = ", ".join(f"{k}={v!r}" for k, v in params.items())
        super().__init__(f"{message} ({detail})" if detail else message)


class QuadratureError(ArithmeticError):
    """Quadrature did not reach the requested accuracy.

    ``estimate`` carries the last partial estimate.
    """

    def __init__(self, message: str, estimate=None):
        self.estimate = estimate
        super().__init__(message)


class UnreachableTargetError(RuntimeError):
    """The target has no component the actuator can reach."""
