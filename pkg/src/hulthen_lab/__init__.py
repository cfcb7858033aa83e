"""Closed-form spectra, eigenfunctions and Crum-Darboux chains of the deformed
Hulthen potential, with numerical oracles that check every closed form."""

from .errors import (
    ConvergenceError,
    DomainError,
    HulthenError,
    InexactDivisionError,
    InvalidParameters,
    InvalidSeedError,
    NoSuchStateError,
    TheoryViolation,
    UsageError,
)
from .exppoly import ExpPoly
from .hulthen import PhysicalParams, ReducedParams, bound_state, bound_state_count, energy, spectrum
from .verify import VerificationReport, run_verification

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "ExpPoly",
    "HulthenError",
    "InexactDivisionError",
    "InvalidParameters",
    "InvalidSeedError",
    "NoSuchStateError",
    "PhysicalParams",
    "ReducedParams",
    "TheoryViolation",
    "UsageError",
    "VerificationReport",
    "bound_state",
    "bound_state_count",
    "energy",
    "run_verification",
    "spectrum",
]
