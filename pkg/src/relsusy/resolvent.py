"""Block resolvent of the relativistic Hamiltonians.

With ``g(zeta) = (H^2 - zeta)^-1`` block diagonal, the resolvent is
``G(z) = (H - z)^-1 = (H + z) g(z^2)`` and its blocks reduce to
non-relativistic Green's functions at ``xi = zeta / 2mc^2 - mc^2 / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fw import fw_hamiltonian
from .landau import windowed_residual
from .models import BlockHamiltonian, assemble_full, nonrel_hamiltonian
from .opalg import Operator, ShiftOnSpectrum, op_norm, rel_residual, solve_shifted


@dataclass
class ResolventReport:
    z: complex
    G_block: Operator
    g_plus: Operator
    g_minus: Operator
    residual_direct: float
    residual_iterated: float
    residual_reduction: float
    unwindowed_direct: float = 0.0

    def passed(self, tol: float) -> bool:
        return max(self.residual_direct, self.residual_iterated, self.residual_reduction) <= tol


def default_shifts(mc2: float = 1.0) -> list[complex]:
    """``{i, -i, 1 + i, 2 m c^2 + i, 0.3 i m c^2}``."""
    return [1j, -1j, 1 + 1j, 2 * mc2 + 1j, 0.3j * mc2]


def energies(H: BlockHamiltonian) -> np.ndarray:
    """Spectrum of ``H`` on the truncated space, read off ``H_fw``."""
    return np.linalg.eigvalsh(fw_hamiltonian(H).H_fw.mat)


def check_shift(H: BlockHamiltonian, z: complex, spectrum: np.ndarray | None = None) -> None:
    """Raise ``ShiftOnSpectrum`` when ``z`` is within the shift margin of the
    spectrum of ``H`` or ``z^2`` of the spectrum of ``H^2``."""
    spec = H.spec
    e = energies(H) if spectrum is None else np.asarray(spectrum)
    scale = max(1.0, float(np.max(np.abs(e))))
    margin = spec.tolerances.shift_margin * scale
    if np.min(np.abs(e - z)) <= margin:
        raise ShiftOnSpectrum(f"shift z={z} lies on the spectrum of H")
    if np.min(np.abs(e ** 2 - z * z)) <= margin * scale:
        raise ShiftOnSpectrum(f"shift z^2={z * z} lies on the spectrum of H^2")


def iterated_resolvent_blocks(H: BlockHamiltonian, zeta: complex):
    """``g+-(zeta) = (M+-^2 + sf 2mc^2 H+- - zeta)^-1`` with ``2mc^2 H+ = A A^dag``
    and ``2mc^2 H- = A^dag A``."""
    tol = H.spec.tolerances
    A, Ad = H.A, H.A.dag()
    sf = H.sign_factor
    k_plus = H.M_plus @ H.M_plus + (A @ Ad) * sf
    k_minus = H.M_minus @ H.M_minus + (Ad @ A) * sf
    return solve_shifted(k_plus, zeta, tol), solve_shifted(k_minus, zeta, tol)


def _graded_diag(p: Operator, m: Operator) -> Operator:
    zero = Operator.zeros(p.basis)
    return Operator.from_blocks(p, zero, zero, m)


def assemble_block_resolvent(H: BlockHamiltonian, z: complex, g_plus: Operator,
                             g_minus: Operator) -> Operator:
    """``[[(z + M+) g+, A g-], [sf A^dag g+, (z - M-) g-]]``."""
    return Operator.from_blocks((H.M_plus + z) @ g_plus, H.A @ g_minus,
                                H.A.dag() @ g_plus * H.sign_factor,
                                (z - H.M_minus) @ g_minus)


def nonrel_reduction_check(H: BlockHamiltonian, zeta: complex, blocks=None) -> float:
    """Windowed ``max ||g+-(zeta) - (H_NR - xi)^-1 / 2mc^2||`` (relative)."""
    spec = H.spec
    mc2 = spec.rest_energy
    xi = zeta / (2 * mc2) - mc2 / 2
    g_plus, g_minus = iterated_resolvent_blocks(H, zeta) if blocks is None else blocks
    g_nr = solve_shifted(nonrel_hamiltonian(spec).H_nr, xi, spec.tolerances) / (2 * mc2)
    win = spec.window()
    return max(windowed_residual(g - g_nr, g_nr, win) for g in (g_plus, g_minus))


def block_resolvent(H: BlockHamiltonian, z: complex, spectrum: np.ndarray | None = None
                    ) -> ResolventReport:
    """Assemble ``G(z)`` from the iterated-resolvent blocks and compare it with
    a direct shifted solve and with ``(H + z) (H^2 - z^2)^-1``.

    Residuals are relative and restricted to the graded interior window; the
    full-space direct residual is kept in ``unwindowed_direct``.
    """
    spec = H.spec
    tol = spec.tolerances
    z = complex(z)
    check_shift(H, z, spectrum)
    blocks = iterated_resolvent_blocks(H, z * z)
    G = assemble_block_resolvent(H, z, *blocks)
    full = assemble_full(H)
    direct = solve_shifted(full, z, tol)
    iterated = (full + z) @ solve_shifted(full @ full, z * z, tol)
    win = spec.window(graded=True)
    return ResolventReport(
        z, G, blocks[0], blocks[1],
        windowed_residual(G - direct, direct, win),
        windowed_residual(G - iterated, iterated, win),
        nonrel_reduction_check(H, z * z, blocks),
        rel_residual(G - direct, direct),
    )


def first_resolvent_identity(H: BlockHamiltonian, z1: complex, z2: complex) -> float:
    """Relative residual of ``G(z1) - G(z2) = (z1 - z2) G(z1) G(z2)``."""
    g1 = block_resolvent(H, z1).G_block
    g2 = block_resolvent(H, z2).G_block
    lhs = g1 - g2
    rhs = g1 @ g2 * (z1 - z2)
    return op_norm(lhs - rhs) / max(1.0, op_norm(lhs))
