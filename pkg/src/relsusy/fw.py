"""Exact Foldy-Wouthuysen block diagonalisation.

Because the mass operator commutes with the odd part, ``H^2`` is block
diagonal and ``H_fw = beta sqrt(H^2)`` follows without any expansion.  The
transformation itself is available in two closed forms:

* ``U = (|H| + beta H) (2 H^2 + 2 M |H|)^(-1/2)``;
* ``U = X (X Y)^(-1/2)`` with ``X = P+ L+ + P- L-`` and ``Y = L+ P+ + L- P-``,
  where ``P = (1 +- beta)/2`` and ``L = (1 +- sgn H)/2``.

For the pseudo-Hermitian boson models ``U`` is not unitary; the binding check
is the similarity form ``U H U^-1 = H_fw``.  The ``U^dag`` variants are reported
for every model but only required to pass for fermions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .landau import windowed_residual
from .models import (
    BlockHamiltonian,
    ModelSpec,
    assemble_full,
    build_model,
    even_odd_decompose,
    grading_operator,
    nonrel_graded,
    nonrel_hamiltonian,
)
from .opalg import (
    DEFAULT_TOL,
    Operator,
    Tolerances,
    hermitian_inv_sqrt,
    hermitian_sqrt_psd,
    hermiticity_residual,
    op_norm,
    sign_operator,
)
from .report import CheckReport
from .susy import SpectrumPair

# Ratio window for d(10 c) / d(c): 1/100 within a factor of two.
NONREL_RATIO_WINDOW = (0.005, 0.02)


@dataclass
class FwResult:
    H_squared: Operator
    H_fw: Operator
    U: Operator | None = None
    U_inv: Operator | None = None
    projectors: dict = field(default_factory=dict)
    residuals: CheckReport = field(default_factory=CheckReport)


class FwUnitary(NamedTuple):
    U: Operator
    U_inv: Operator
    forms_residual: float


def offdiag(x: Operator) -> Operator:
    """The two off-diagonal grading blocks of ``x`` (diagonal blocks zeroed)."""
    zero = Operator.zeros(x.basis.ungraded())
    return Operator.from_blocks(zero, x.block(0, 1), x.block(1, 0), zero)


def _rel(r: Operator, ref: Operator) -> float:
    return op_norm(r) / max(1.0, op_norm(ref))


def fw_hamiltonian(H: BlockHamiltonian) -> FwResult:
    """``H^2`` and ``H_fw = beta sqrt(H^2)`` with their structural checks.

    Raises ``NegativeSpectrum`` when ``H^2`` has a negative eigenvalue
    (supercritical spin-one field).
    """
    spec = H.spec
    tol = spec.tolerances
    full = assemble_full(H)
    beta = grading_operator(full.basis)
    h2 = full @ full
    rep = CheckReport()
    rep.add("H2_block_diagonal", _rel(offdiag(h2), h2), tol.identity_tol)
    rep.add("H2_hermitian", hermiticity_residual(h2), tol.identity_tol)
    h_fw = beta @ hermitian_sqrt_psd(h2, tol)
    rep.add("Hfw_block_diagonal", _rel(offdiag(h_fw), h_fw), tol.identity_tol)
    rep.add("Hfw_squared_equals_H2", _rel(h_fw @ h_fw - h2, h2), tol.interior_tol)

    # beta m c^2 sqrt(1 + 2 H_NR / m c^2) = beta sqrt(m^2 c^4 + 2 m c^2 H_NR)
    mc2 = spec.rest_energy
    closed = beta @ hermitian_sqrt_psd(nonrel_graded(spec) * (2 * mc2) + mc2 ** 2, tol)
    rep.add("Hfw_closed_form", windowed_residual(h_fw - closed, h_fw, spec.window(graded=True)),
            tol.interior_tol)
    return FwResult(h2, h_fw, residuals=rep)


def fw_unitary(H_full: Operator, beta: Operator, tol: Tolerances = DEFAULT_TOL) -> FwUnitary:
    """Both closed forms of the transformation and their relative difference.

    ``U_inv`` is a direct matrix inverse.  Raises ``NearSingular`` when
    ``sgn H`` is ill defined (an energy within ``shift_margin`` of zero).
    """
    h2 = H_full @ H_full
    abs_h = hermitian_sqrt_psd(h2, tol)
    m_even, _ = even_odd_decompose(H_full)
    denom = h2 * 2.0 + m_even @ abs_h * 2.0
    # m_even and |H| commute, so the product is Hermitian up to rounding.
    denom = (denom + denom.dag()) / 2.0
    U = (abs_h + beta @ H_full) @ hermitian_inv_sqrt(denom, tol)

    sgn = sign_operator(H_full, tol)
    eye = Operator.identity(H_full.basis)
    p_plus, p_minus = (eye + beta) / 2.0, (eye - beta) / 2.0
    l_plus, l_minus = (eye + sgn) / 2.0, (eye - sgn) / 2.0
    X = p_plus @ l_plus + p_minus @ l_minus
    Y = l_plus @ p_plus + l_minus @ p_minus
    XY = X @ Y
    U_proj = X @ hermitian_inv_sqrt((XY + XY.dag()) / 2.0, tol)

    U_inv = Operator(np.linalg.inv(U.mat), U.basis)
    return FwUnitary(U, U_inv, _rel(U - U_proj, U))


def verify_fw_transform(H_full: Operator, U: Operator, U_inv: Operator, H_fw: Operator,
                        fermion: bool | None = None,
                        tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """Residuals (a)-(d) of the transformation.

    (a) ``offdiag(U H U^-1)``; (b) ``U H U^-1 - H_fw``; (c) ``offdiag(U H U^dag)``;
    (d) ``U^dag U - I``.  (a) and (b) must pass for every model; (c) and (d)
    only when ``H`` is Hermitian (``fermion``, inferred when not given).
    """
    if fermion is None:
        fermion = hermiticity_residual(H_full) <= tol.identity_tol
    sim = U @ H_full @ U_inv
    uni = U @ H_full @ U.dag()
    eye = Operator.identity(U.basis)
    rep = CheckReport()
    rep.add("similarity_offdiag", _rel(offdiag(sim), sim), tol.interior_tol)
    rep.add("similarity_vs_Hfw", _rel(sim - H_fw, H_fw), tol.interior_tol)
    r_c = _rel(offdiag(uni), uni)
    r_d = op_norm(U.dag() @ U - eye)
    if fermion:
        rep.add("adjoint_offdiag", r_c, tol.interior_tol)
        rep.add("unitarity", r_d, tol.interior_tol)
    else:
        rep.add("adjoint_offdiag", r_c, tol.interior_tol, passed=True, informational=True)
        rep.add("unitarity", r_d, tol.interior_tol, passed=True, informational=True)
    return rep


def energy_projectors(H_full: Operator, U: Operator, U_inv: Operator, beta: Operator,
                      fermion: bool | None = None,
                      tol: Tolerances = DEFAULT_TOL) -> tuple[dict, CheckReport]:
    """Parity projectors ``P+-`` and energy projectors ``L+-`` with their checks."""
    if fermion is None:
        fermion = hermiticity_residual(H_full) <= tol.identity_tol
    eye = Operator.identity(H_full.basis)
    sgn = sign_operator(H_full, tol)
    proj = {
        "P_plus": (eye + beta) / 2.0,
        "P_minus": (eye - beta) / 2.0,
        "Lambda_plus": (eye + sgn) / 2.0,
        "Lambda_minus": (eye - sgn) / 2.0,
    }
    rep = CheckReport()
    for name, p in proj.items():
        rep.add(f"{name}_idempotent", _rel(p @ p - p, p), tol.interior_tol)
    rep.add("P_complete", op_norm(proj["P_plus"] + proj["P_minus"] - eye), tol.identity_tol)
    rep.add("Lambda_complete", op_norm(proj["Lambda_plus"] + proj["Lambda_minus"] - eye),
            tol.identity_tol)
    rep.add("P_orthogonal", op_norm(proj["P_plus"] @ proj["P_minus"]), tol.identity_tol)
    for sign in ("plus", "minus"):
        p, lam = proj[f"P_{sign}"], proj[f"Lambda_{sign}"]
        rep.add(f"P_{sign}_similarity", _rel(p - U @ lam @ U_inv, p), tol.interior_tol)
        if fermion:
            rep.add(f"P_{sign}_adjoint", _rel(p - U @ lam @ U.dag(), p), tol.interior_tol)
    return proj, rep


def interior_fw_spectrum(fw: FwResult, spec: ModelSpec):
    """Eigenpairs of ``H_fw`` compressed to the graded interior window.

    Returns eigenvalues (ascending) and eigenvectors in window coordinates.
    """
    win = spec.window(graded=True)
    h = win.window(fw.H_fw)
    return np.linalg.eigh(0.5 * (h + h.conj().T))


def eigenvector_transport_residual(H_full: Operator, U_inv: Operator, fw: FwResult,
                                   spec: ModelSpec) -> float:
    """``max ||H Psi - E Psi|| / ||Psi||`` over ``Psi = U^-1 psi`` for the interior
    FW eigenpairs ``(E, psi)``."""
    win = spec.window(graded=True)
    w, v = interior_fw_spectrum(fw, spec)
    worst = 0.0
    for e, vec in zip(w, v.T):
        psi = U_inv.mat @ win.embed(vec)
        r = np.linalg.norm(H_full.mat @ psi - e * psi) / np.linalg.norm(psi)
        worst = max(worst, float(r))
    return worst


def partner_energy_residual(fw: FwResult, pair: SpectrumPair, spec: ModelSpec) -> float:
    """Elementwise mismatch between the interior ``H_fw`` spectrum and the
    energies assembled from the partner spectrum."""
    w, _ = interior_fw_spectrum(fw, spec)
    e_plus, e_minus = pair.energies()
    assembled = np.concatenate([e_plus, e_minus])
    assembled = np.sort(assembled[np.isfinite(assembled)])
    if len(assembled) != len(w):
        return float("inf")
    return float(np.max(np.abs(np.sort(w) - assembled)))


def spectral_symmetry_residual(fw: FwResult, spec: ModelSpec) -> float:
    """``max |E+ + E-|`` between the sorted positive- and negative-parity
    interior spectra (``{E+} = {-E-}``)."""
    win = spec.window()
    h = fw.H_fw
    e_plus = np.sort(np.linalg.eigvalsh(win.window(h.block(0, 0))))
    e_minus = np.sort(-np.linalg.eigvalsh(win.window(h.block(1, 1))))
    return float(np.max(np.abs(e_plus - e_minus))) if len(e_plus) else 0.0


def nonrel_distance(spec: ModelSpec) -> float:
    """``d(c) = ||interior(P+ H_fw P+ - m c^2 - H_NR)||`` (absolute)."""
    fw = fw_hamiltonian(build_model(spec))
    upper = fw.H_fw.block(0, 0)
    diff = upper - spec.rest_energy - nonrel_hamiltonian(spec).H_nr
    return op_norm(spec.window().window(diff))


def expansion_parameter(spec: ModelSpec) -> float:
    """``2 ||interior H_NR|| / m c^2``, the argument of the square-root expansion."""
    h = nonrel_hamiltonian(spec).H_nr
    return 2 * op_norm(spec.window().window(h)) / spec.rest_energy


def nonrel_limit_check(spec: ModelSpec, c_list=(1.0, 10.0, 100.0)) -> CheckReport:
    """``d(c)`` along an ascending list of speeds of light.

    Checks that ``d`` decreases and that every decade step ``c -> 10 c``
    shrinks it by ``1/100`` within a factor of two.  The ratio is only binding
    when the smaller ``c`` is in the convergent regime of the square-root
    expansion, ``x = 2 ||interior H_NR|| / m c^2 < 1``; other decade ratios are
    reported as informational.
    """
    cs = [float(c) for c in c_list]
    if any(b <= a for a, b in zip(cs, cs[1:])):
        raise ValueError("c_list must be strictly ascending")
    d = {c: nonrel_distance(spec.replace(c=c)) for c in cs}
    rep = CheckReport()
    for c in cs:
        rep.add(f"d(c={c:g})", d[c], float("inf"), passed=True, c=c)
    lo, hi = NONREL_RATIO_WINDOW
    for a, b in zip(cs, cs[1:]):
        rep.add_flag(f"decreasing(c={a:g}->{b:g})", d[b] < d[a] or d[a] == 0.0)
        if np.isclose(b, 10 * a):
            ratio = d[b] / d[a] if d[a] > 0 else 0.0
            x = expansion_parameter(spec.replace(c=a))
            ok = lo <= ratio <= hi
            if x < 1.0:
                rep.add(f"ratio(c={a:g}->{b:g})", ratio, hi, passed=ok,
                        window_low=lo, expansion_parameter=x)
            else:
                rep.add(f"ratio(c={a:g}->{b:g})", ratio, hi, passed=True, window_low=lo,
                        expansion_parameter=x, informational=True)
    return rep


def fw_pipeline(H: BlockHamiltonian) -> FwResult:
    """``fw_hamiltonian`` plus the transformation, its checks and the projectors."""
    spec = H.spec
    tol = spec.tolerances
    res = fw_hamiltonian(H)
    full = assemble_full(H)
    beta = grading_operator(full.basis)
    U, U_inv, forms = fw_unitary(full, beta, tol)
    res.U, res.U_inv = U, U_inv
    res.residuals.add("U_closed_forms_agree", forms, tol.interior_tol)
    res.residuals.extend(verify_fw_transform(full, U, U_inv, res.H_fw, H.is_fermion, tol))
    if H.is_fermion:
        res.residuals.add("unitarity_UUdag",
                          op_norm(U @ U.dag() - Operator.identity(U.basis)), tol.identity_tol)
    res.projectors, prep = energy_projectors(full, U, U_inv, beta, H.is_fermion, tol)
    res.residuals.extend(prep)
    res.residuals.add("eigenvector_transport",
                      eigenvector_transport_residual(full, U_inv, res, spec), tol.interior_tol)
    return res
