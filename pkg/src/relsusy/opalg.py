"""Dense complex operator algebra.

Every quantum operator in the package is an :class:`Operator`: a square
complex matrix tagged with the tensor-product basis it acts on.  The basis
ordering is ``grading (x) Fock (x) spin`` with the grading index outermost, so
a graded operator is the 2x2 block matrix ``[[X_pp, X_pm], [X_mp, X_mm]]``
over the ungraded ``Fock (x) spin`` space.

Matrix functions (square root, sign, inverse square root) go through a full
Hermitian eigendecomposition.  Degenerate eigenvalues need no special care:
the spectral function is applied per eigenvalue, so it is constant on each
eigenspace regardless of which orthonormal basis ``eigh`` happens to return.

All residuals are relative spectral-norm residuals ``||R|| / max(1, ||ref||)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class BasisMismatch(ValueError):
    """Binary operation on operators with different basis tags."""


class NumericalError(ArithmeticError):
    """Base class for failures of the numerical preconditions."""


class NotHermitian(NumericalError):
    pass


class NegativeSpectrum(NumericalError):
    """A matrix that must be positive semidefinite has a negative eigenvalue."""


class NearSingular(NumericalError):
    """The sign function is undefined: an energy eigenvalue is (close to) zero."""


class ShiftOnSpectrum(NumericalError):
    pass


@dataclass(frozen=True)
class BasisTag:
    n_fock: int
    spin_dim: int = 1
    graded: bool = False

    def __post_init__(self):
        if self.n_fock < 1 or self.spin_dim < 1:
            raise ValueError(f"invalid basis dimensions {self}")

    @property
    def dim(self) -> int:
        return self.n_fock * self.spin_dim * (2 if self.graded else 1)

    @property
    def sector_dim(self) -> int:
        """Dimension of one grading sector (the ungraded space)."""
        return self.n_fock * self.spin_dim

    def ungraded(self) -> "BasisTag":
        return BasisTag(self.n_fock, self.spin_dim, False)

    def with_grading(self) -> "BasisTag":
        return BasisTag(self.n_fock, self.spin_dim, True)


@dataclass(frozen=True)
class Tolerances:
    identity_tol: float = 1e-12
    interior_tol: float = 1e-10
    kernel_rel: float = 1e-8
    shift_margin: float = 1e-6

    def __post_init__(self):
        for name in ("identity_tol", "interior_tol", "kernel_rel", "shift_margin"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.kernel_rel < 1:
            raise ValueError("kernel_rel must be < 1")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True, eq=False)
class Operator:
    """Immutable dense complex square matrix with basis metadata."""

    mat: np.ndarray
    basis: BasisTag

    def __post_init__(self):
        arr = np.array(self.mat, dtype=complex)
        if arr.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(
                f"matrix shape {arr.shape} does not match basis dim {self.basis.dim}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "mat", arr)

    @classmethod
    def identity(cls, basis: BasisTag) -> "Operator":
        return cls(np.eye(basis.dim), basis)

    @classmethod
    def zeros(cls, basis: BasisTag) -> "Operator":
        return cls(np.zeros((basis.dim, basis.dim)), basis)

    @classmethod
    def from_blocks(cls, pp, pm, mp, mm) -> "Operator":
        """Graded operator from its four ungraded blocks."""
        basis = pp.basis
        for blk in (pm, mp, mm):
            _check_basis(pp, blk)
        if basis.graded:
            raise BasisMismatch("blocks must be ungraded operators")
        return cls(np.block([[pp.mat, pm.mat], [mp.mat, mm.mat]]), basis.with_grading())

    @property
    def dim(self) -> int:
        return self.basis.dim

    def block(self, i: int, j: int) -> "Operator":
        """Ungraded block (i, j) of a graded operator; 0 = positive parity."""
        if not self.basis.graded:
            raise BasisMismatch("block() needs a graded operator")
        d = self.basis.sector_dim
        return Operator(self.mat[i * d:(i + 1) * d, j * d:(j + 1) * d], self.basis.ungraded())

    def dag(self) -> "Operator":
        return Operator(self.mat.conj().T, self.basis)

    def _coerce(self, other):
        if isinstance(other, Operator):
            _check_basis(self, other)
            return other.mat
        return other * np.eye(self.dim)

    def __add__(self, other):
        return Operator(self.mat + self._coerce(other), self.basis)

    __radd__ = __add__

    def __sub__(self, other):
        return Operator(self.mat - self._coerce(other), self.basis)

    def __rsub__(self, other):
        return Operator(self._coerce(other) - self.mat, self.basis)

    def __neg__(self):
        return Operator(-self.mat, self.basis)

    def __matmul__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        _check_basis(self, other)
        return Operator(self.mat @ other.mat, self.basis)

    def __mul__(self, scalar):
        if isinstance(scalar, Operator):
            raise TypeError("use @ for operator products")
        return Operator(self.mat * scalar, self.basis)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Operator(self.mat / scalar, self.basis)

    def __repr__(self):
        return f"Operator(dim={self.dim}, basis={self.basis})"


def _check_basis(x: Operator, y: Operator) -> None:
    if x.basis != y.basis:
        raise BasisMismatch(f"basis mismatch: {x.basis} vs {y.basis}")


def commutator(x: Operator, y: Operator) -> Operator:
    _check_basis(x, y)
    return Operator(x.mat @ y.mat - y.mat @ x.mat, x.basis)


def anticommutator(x: Operator, y: Operator) -> Operator:
    _check_basis(x, y)
    return Operator(x.mat @ y.mat + y.mat @ x.mat, x.basis)


def op_norm(x) -> float:
    """Spectral norm (largest singular value)."""
    mat = x.mat if isinstance(x, Operator) else np.asarray(x)
    if mat.size == 0:
        return 0.0
    return float(np.linalg.norm(mat, 2))


def rel_residual(r, ref) -> float:
    """``||r|| / max(1, ||ref||)``."""
    return op_norm(r) / max(1.0, op_norm(ref))


def hermiticity_residual(x) -> float:
    mat = x.mat if isinstance(x, Operator) else np.asarray(x)
    return rel_residual(mat - mat.conj().T, mat)


def _hermitian_eigh(x: Operator, tol: Tolerances):
    res = hermiticity_residual(x)
    if res > tol.identity_tol:
        raise NotHermitian(f"operator not Hermitian (relative residual {res:.3e})")
    sym = 0.5 * (x.mat + x.mat.conj().T)
    return np.linalg.eigh(sym)


def _psd_eigh(x: Operator, tol: Tolerances):
    w, v = _hermitian_eigh(x, tol)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    if w.size and w[0] < -tol.identity_tol * scale:
        raise NegativeSpectrum(
            f"smallest eigenvalue {w[0]:.6g} is negative beyond tolerance"
        )
    return np.clip(w, 0.0, None), v, scale


def hermitian_sqrt_psd(x: Operator, tol: Tolerances = DEFAULT_TOL) -> Operator:
    """Unique positive-semidefinite square root of a Hermitian PSD operator.

    Eigenvalues in ``[-identity_tol * ||x||, 0)`` are treated as rounding noise
    and clamped to zero; anything more negative raises :class:`NegativeSpectrum`.
    """
    w, v, _ = _psd_eigh(x, tol)
    return Operator((v * np.sqrt(w)) @ v.conj().T, x.basis)


def hermitian_inv_sqrt(x: Operator, tol: Tolerances = DEFAULT_TOL) -> Operator:
    """``x^{-1/2}`` for Hermitian positive definite ``x``."""
    w, v, scale = _psd_eigh(x, tol)
    if w.size and w[0] <= tol.shift_margin * scale:
        raise NearSingular(
            f"smallest eigenvalue {w[0]:.3e} within shift margin of zero"
        )
    return Operator((v / np.sqrt(w)) @ v.conj().T, x.basis)


def sign_operator(h: Operator, tol: Tolerances = DEFAULT_TOL) -> Operator:
    """``sgn H = H (H^2)^{-1/2}``.

    ``h`` itself may be non-Hermitian (pseudo-Hermitian bosonic Hamiltonians),
    but ``h @ h`` must be Hermitian positive definite.
    """
    return h @ hermitian_inv_sqrt(h @ h, tol)


class Kernel(NamedTuple):
    dim: int
    vectors: np.ndarray  # columns form an orthonormal kernel basis


def kernel_dim(x, kernel_rel: float = DEFAULT_TOL.kernel_rel,
               tol: Tolerances = DEFAULT_TOL) -> Kernel:
    """Kernel of a Hermitian PSD operator.

    An eigenvalue counts as zero when it is at most ``kernel_rel`` times the
    largest eigenvalue (absolute threshold ``kernel_rel`` for the zero operator).
    Accepts an :class:`Operator` or a bare square array.
    """
    op = x if isinstance(x, Operator) else None
    mat = x.mat if op is not None else np.asarray(x, dtype=complex)
    if hermiticity_residual(mat) > tol.identity_tol:
        raise NotHermitian("kernel_dim needs a Hermitian operator")
    w, v = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    top = float(np.max(np.abs(w))) if w.size else 0.0
    threshold = kernel_rel * (top if top > 0 else 1.0)
    mask = w <= threshold
    return Kernel(int(mask.sum()), v[:, mask])


def solve_shifted(x: Operator, z: complex, tol: Tolerances = DEFAULT_TOL) -> Operator:
    """``(x - z I)^{-1}``, refusing shifts within ``shift_margin`` of the spectrum."""
    shifted = x.mat - z * np.eye(x.dim)
    smin = float(np.linalg.svd(shifted, compute_uv=False)[-1])
    if smin <= tol.shift_margin * max(1.0, op_norm(x)):
        raise ShiftOnSpectrum(f"shift {z} lies on the spectrum (sigma_min={smin:.3e})")
    inv = np.linalg.solve(shifted, np.eye(x.dim))
    res = rel_residual(shifted @ inv - np.eye(x.dim), np.eye(x.dim))
    if res > tol.interior_tol:
        raise ShiftOnSpectrum(f"shifted solve residual {res:.3e} exceeds tolerance")
    return Operator(inv, x.basis)
