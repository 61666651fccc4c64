"""Exact p-adic kernel for Witt-vector constructions over Breuil-Kisin prisms."""

from .errors import (
    CapExceeded,
    InexactDivision,
    InsufficientValuation,
    LengthCap,
    NonFreeModule,
    NotAUnit,
    PrecisionExhausted,
    PrimeMismatch,
    RingMismatch,
    Unbounded,
)
from .padic import PAdic, PAdicRing
from .rings import DigitRing, DualRing, Eisenstein, SRing

__all__ = [
    "CapExceeded",
    "DigitRing",
    "DualRing",
    "Eisenstein",
    "InexactDivision",
    "InsufficientValuation",
    "LengthCap",
    "NonFreeModule",
    "NotAUnit",
    "PAdic",
    "PAdicRing",
    "PrecisionExhausted",
    "PrimeMismatch",
    "RingMismatch",
    "SRing",
    "Unbounded",
]
