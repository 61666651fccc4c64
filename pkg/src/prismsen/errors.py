"""Exception types shared across the package."""

from __future__ import annotations


class PrismSenError(Exception):
    """Base class for all package errors."""


class InsufficientValuation(PrismSenError, ArithmeticError):
    """A division by p^k was requested but the value is not known to be divisible.

    ``index`` is set when the failure happens inside an indexed recursion
    (ghost level, recursion coordinate, ...). ``context`` carries any extra
    labels the caller attached.
    """

    def __init__(self, message: str, index=None, context: dict | None = None):
        super().__init__(message)
        self.index = index
        self.context = dict(context or {})


class PrecisionExhausted(PrismSenError, ArithmeticError):
    pass


class NotAUnit(PrismSenError, ArithmeticError):
    pass


class PrimeMismatch(PrismSenError, ValueError):
    pass


class RingMismatch(PrismSenError, ValueError):
    pass


class LengthCap(PrismSenError, ValueError):
    pass


class CapExceeded(PrismSenError, ValueError):
    pass


class InexactDivision(PrismSenError, ArithmeticError):
    pass


class NonFreeModule(PrismSenError, ValueError):
    pass


class Unbounded(PrismSenError, RuntimeError):
    pass
