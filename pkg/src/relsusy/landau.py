"""Truncated Fock-space machinery for a charged particle in a constant field.

Conventions: electron charge (e < 0), field along +z, so the field coupling
``e hbar B / c`` equals ``-m hbar omega_c``.  A single ladder pair carries the
transverse motion; the guiding-centre degeneracy is not represented, so each
Landau level appears once per k_z fibre.

Truncating the ladder at ``n_fock`` levels corrupts products that pass through
the top level (``a a^dag`` is wrong on the last level).  Identities are therefore
compared on an interior window that drops the top ``buffer`` Fock levels.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .opalg import BasisTag, Operator

LADDER_EXACT = "ladder_exact"
MATRIX_PRODUCT = "matrix_product"


@dataclass(frozen=True)
class LadderPair:
    a: Operator
    a_dag: Operator
    n_fock: int

    @property
    def number(self) -> Operator:
        return self.a_dag @ self.a


def ladder_pair(n_fock: int) -> LadderPair:
    if n_fock < 2:
        raise ValueError("n_fock must be at least 2")
    a = np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), 1)
    basis = BasisTag(n_fock)
    return LadderPair(Operator(a, basis), Operator(a.T, basis), n_fock)


@dataclass(frozen=True)
class KineticMomentum:
    pi_x: Operator
    pi_y: Operator
    pi_z: Operator
    omega_c: float
    k_z: float
    m: float = 1.0
    hbar: float = 1.0
    charge_sign: int = -1

    @property
    def field_coupling(self) -> float:
        """``e hbar B / c`` in units where the field enters through omega_c."""
        return self.charge_sign * self.m * self.hbar * self.omega_c

    def squared(self) -> Operator:
        """``pi^2`` by direct matrix products (corrupted on the top level)."""
        return self.pi_x @ self.pi_x + self.pi_y @ self.pi_y + self.pi_z @ self.pi_z

    def components(self):
        return (self.pi_x, self.pi_y, self.pi_z)


def kinetic_momentum(n_fock: int, omega_c: float, k_z: float = 0.0,
                     m: float = 1.0, hbar: float = 1.0) -> KineticMomentum:
    """Kinetic momentum ``p - eA/c`` on a truncated single ladder.

    ``pi_x = l (a + a^dag)`` and ``pi_y = i l (a - a^dag)`` with
    ``l = sqrt(m hbar omega_c / 2)``; the relative sign of ``pi_y`` makes
    ``[pi_x, pi_y] = -i hbar m omega_c`` (electron, B along +z).
    """
    if omega_c <= 0:
        raise ValueError("omega_c must be positive")
    if m <= 0 or hbar <= 0:
        raise ValueError("m and hbar must be positive")
    lad = ladder_pair(n_fock)
    scale = np.sqrt(m * hbar * omega_c / 2.0)
    pi_x = (lad.a + lad.a_dag) * scale
    pi_y = (lad.a - lad.a_dag) * (1j * scale)
    pi_z = Operator.identity(lad.a.basis) * (hbar * k_z)
    return KineticMomentum(pi_x, pi_y, pi_z, omega_c, k_z, m, hbar)


def landau_hamiltonian(n_fock: int, omega_c: float, k_z: float = 0.0, m: float = 1.0,
                       hbar: float = 1.0, mode: str = LADDER_EXACT) -> Operator:
    """``H_L = pi^2 / 2m``.

    ``ladder_exact`` uses ``hbar omega_c (a^dag a + 1/2) + hbar^2 k_z^2 / 2m``
    and is exact on every retained level; ``matrix_product`` squares the
    truncated kinetic-momentum matrices and is wrong on the top level.
    """
    if mode == LADDER_EXACT:
        if omega_c <= 0:
            raise ValueError("omega_c must be positive")
        levels = hbar * omega_c * (np.arange(n_fock) + 0.5) + (hbar * k_z) ** 2 / (2 * m)
        return Operator(np.diag(levels), BasisTag(n_fock))
    if mode == MATRIX_PRODUCT:
        pi = kinetic_momentum(n_fock, omega_c, k_z, m, hbar)
        return pi.squared() / (2 * m)
    raise ValueError(f"unknown mode {mode!r}")


def with_spin(fock_op: Operator, spin_dim: int) -> Operator:
    """``fock_op (x) 1_spin``."""
    if fock_op.basis.spin_dim != 1 or fock_op.basis.graded:
        raise ValueError("expected a bare Fock-space operator")
    return Operator(np.kron(fock_op.mat, np.eye(spin_dim)),
                    BasisTag(fock_op.basis.n_fock, spin_dim))


def spin_on_fock(spin_op: Operator, n_fock: int) -> Operator:
    """``1_fock (x) spin_op``."""
    return Operator(np.kron(np.eye(n_fock), spin_op.mat),
                    BasisTag(n_fock, spin_op.dim))


def truncate_fock(x: Operator, n_fock: int) -> Operator:
    """Compress an ungraded operator onto the lowest ``n_fock`` Fock levels."""
    b = x.basis
    if b.graded or n_fock > b.n_fock:
        raise ValueError("truncate_fock needs an ungraded operator on a larger space")
    d = n_fock * b.spin_dim
    return Operator(x.mat[:d, :d], BasisTag(n_fock, b.spin_dim))


@dataclass(frozen=True)
class InteriorProjector:
    buffer: int
    projector: Operator
    indices: np.ndarray  # basis indices kept by the window

    @property
    def rank(self) -> int:
        return len(self.indices)

    def apply(self, x: Operator) -> Operator:
        """``P x P``."""
        return self.projector @ x @ self.projector

    def window(self, x) -> np.ndarray:
        """Rows/columns of ``x`` inside the window as a bare matrix."""
        mat = x.mat if isinstance(x, Operator) else np.asarray(x)
        return mat[np.ix_(self.indices, self.indices)]

    def window_vec(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v)[self.indices]

    def embed(self, v: np.ndarray) -> np.ndarray:
        """Window coordinates back into the full basis (zero outside)."""
        out = np.zeros(self.projector.dim, dtype=complex)
        out[self.indices] = v
        return out


def interior_projector(n_fock: int, spin_dim: int = 1, graded: bool = False,
                       buffer: int = 4) -> InteriorProjector:
    """Orthogonal projector dropping the top ``buffer`` Fock levels in every
    spin and grading sector."""
    if buffer < 0:
        raise ValueError("buffer must be non-negative")
    if buffer >= n_fock:
        raise ValueError("buffer must be smaller than n_fock")
    basis = BasisTag(n_fock, spin_dim, graded)
    fock_index = (np.arange(basis.dim) // spin_dim) % n_fock
    keep = fock_index < n_fock - buffer
    return InteriorProjector(buffer, Operator(np.diag(keep.astype(float)), basis),
                             np.flatnonzero(keep))


def windowed_residual(r: Operator, ref: Operator, proj: InteriorProjector) -> float:
    """Relative spectral-norm residual of ``r`` restricted to the window."""
    num = np.linalg.norm(proj.window(r), 2) if proj.rank else 0.0
    den = np.linalg.norm(proj.window(ref), 2) if proj.rank else 0.0
    return float(num / max(1.0, den))
