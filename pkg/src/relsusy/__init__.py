"""Finite-matrix verification of supersymmetric relativistic Hamiltonians for
spin 0, 1/2 and 1 in a constant magnetic field."""

__version__ = "0.1.0"

from .opalg import (  # noqa: E402
    BasisMismatch,
    BasisTag,
    NearSingular,
    NegativeSpectrum,
    NotHermitian,
    NumericalError,
    Operator,
    ShiftOnSpectrum,
    Tolerances,
)
from .report import CheckEntry, CheckReport  # noqa: E402
from .models import BlockHamiltonian, ModelSpec, build_model  # noqa: E402

__all__ = [
    "BasisMismatch", "BasisTag", "BlockHamiltonian", "CheckEntry", "CheckReport",
    "ModelSpec", "NearSingular", "NegativeSpectrum", "NotHermitian", "NumericalError",
    "Operator", "ShiftOnSpectrum", "Tolerances", "build_model",
]
