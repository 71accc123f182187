"""N = 2 supersymmetry of the block Hamiltonians.

The supercharges are ``Q = [[0, A], [0, 0]] / sqrt(2 m c^2)`` and its adjoint,
the Witten parity is the grading operator ``W = beta``, and the partner
Hamiltonians are ``H+ = A A^dag / 2mc^2`` and ``H- = A^dag A / 2mc^2``.

Spectral statements (kernels, isospectrality, eigenvector mapping) are made on
the interior window of the truncated space: the partner Hamiltonians of a
truncated model acquire spurious zero modes on the top Fock level, e.g. the
Dirac state ``(n_fock - 1, s_z = +1/2)`` at ``k_z = 0`` loses its partner.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .models import BlockHamiltonian, ModelSpec, assemble_full, build_model, grading_operator
from .opalg import (
    NegativeSpectrum,
    Operator,
    anticommutator,
    commutator,
    kernel_dim,
    op_norm,
)
from .landau import windowed_residual
from .report import CheckReport


@dataclass(frozen=True)
class SusySystem:
    Q: Operator
    Q_dag: Operator
    W: Operator
    H_susy: Operator
    H_plus: Operator
    H_minus: Operator
    mass_scale: float
    spec: ModelSpec


def build_susy_system(H: BlockHamiltonian) -> SusySystem:
    spec = H.spec
    mc2 = spec.rest_energy
    zero = Operator.zeros(H.basis)
    Q = Operator.from_blocks(zero, H.A, zero, zero) / np.sqrt(2 * mc2)
    full = assemble_full(H)
    mass = H.mass_graded()
    h_susy = (full @ full - mass @ mass) * (H.sign_factor / (2 * mc2))
    A, Ad = H.A, H.A.dag()
    return SusySystem(Q, Q.dag(), grading_operator(full.basis), h_susy,
                      A @ Ad / (2 * mc2), Ad @ A / (2 * mc2), mc2, spec)


def verify_susy_algebra(sys: SusySystem, H: BlockHamiltonian) -> CheckReport:
    """Windowed relative residuals of the N = 2 algebra and of the centre
    property of the mass operator."""
    tol = sys.spec.tolerances.interior_tol
    win = sys.spec.window(graded=True)
    Q, Qd, W, Hs = sys.Q, sys.Q_dag, sys.W, sys.H_susy
    M = H.mass_graded()
    eye = Operator.identity(W.basis)
    zero = Operator.zeros(H.basis)
    block_form = Operator.from_blocks(sys.H_plus, zero, zero, sys.H_minus)
    rep = CheckReport()
    checks = [
        ("QQdag_anticommutator", anticommutator(Q, Qd) - Hs, Hs),
        ("QW_anticommutator", anticommutator(Q, W), Q),
        ("Q_squared", Q @ Q, Q),
        ("Qdag_squared", Qd @ Qd, Qd),
        ("W_Hsusy_commutator", commutator(W, Hs), Hs),
        ("W_squared", W @ W - eye, eye),
        ("Hsusy_block_form", Hs - block_form, Hs),
        ("center_M_Q", commutator(M, Q), M @ Q),
        ("center_M_W", commutator(M, W), M),
        ("center_M_Hsusy", commutator(M, Hs), M @ Hs),
    ]
    for name, r, ref in checks:
        rep.add(name, windowed_residual(r, ref, win), tol)
    return rep


@dataclass
class SpectrumRecord:
    epsilon: float
    m_plus: float  # Rayleigh quotient of M+, i.e. m_+ c^2
    m_minus: float
    E_plus: float
    E_minus: float
    phi_plus: np.ndarray | None
    phi_minus: np.ndarray | None
    paired: bool
    map_residual: float = 0.0
    norm_residual: float = 0.0


@dataclass
class SpectrumPair:
    records: list[SpectrumRecord]
    threshold: float
    plus_spectrum: np.ndarray = field(default_factory=lambda: np.zeros(0))
    minus_spectrum: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def energies(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([r.E_plus for r in self.records]),
                np.array([r.E_minus for r in self.records]))

    @property
    def max_map_residual(self) -> float:
        return max((r.map_residual for r in self.records if r.paired), default=0.0)

    @property
    def max_norm_residual(self) -> float:
        return max((r.norm_residual for r in self.records if r.paired), default=0.0)

    def max_mass_mismatch(self) -> float:
        return max((abs(r.m_plus - r.m_minus) / max(1.0, abs(r.m_plus))
                    for r in self.records if r.paired), default=0.0)


def _joint_eigh(h_win: np.ndarray, m_win: np.ndarray, cluster_tol: float):
    """Eigenpairs of ``h_win`` with degenerate clusters rotated to diagonalise
    the commuting operator ``m_win``."""
    w, v = np.linalg.eigh(h_win)
    out_v = v.copy()
    start = 0
    while start < len(w):
        stop = start + 1
        while stop < len(w) and w[stop] - w[start] <= cluster_tol:
            stop += 1
        if stop - start > 1:
            block = v[:, start:stop]
            sub = block.conj().T @ m_win @ block
            _, rot = np.linalg.eigh(0.5 * (sub + sub.conj().T))
            out_v[:, start:stop] = block @ rot
        start = stop
    return w, out_v


def _energy(mass: float, sf: int, mc2: float, eps: float) -> float:
    radicand = mass ** 2 + sf * 2 * mc2 * eps
    if radicand < -1e-12 * max(1.0, mass ** 2):
        raise NegativeSpectrum(f"complex energy: radicand {radicand:.6g} < 0")
    return float(np.sqrt(max(radicand, 0.0)))


def partner_spectrum_map(sys: SusySystem, H: BlockHamiltonian) -> SpectrumPair:
    """Pair the partner eigenstates through ``phi+ = A phi- / sqrt(2 m c^2 eps)``.

    Eigenstates of ``H-`` on the interior window are taken as simultaneous
    eigenstates of ``M-`` (degenerate clusters are rotated accordingly), mapped
    by ``A`` and checked to be unit eigenvectors of ``H+``.  Mass eigenvalues are
    Rayleigh quotients; energies follow ``E = +-sqrt(m^2 c^4 + sf 2mc^2 eps)``.
    """
    spec = sys.spec
    mc2 = sys.mass_scale
    win = spec.window()
    hm_w = win.window(sys.H_minus)
    hp_w = win.window(sys.H_plus)
    scale = max(1.0, float(np.max(np.abs(np.linalg.eigvalsh(hm_w)))))
    threshold = spec.tolerances.kernel_rel * scale
    cluster_tol = spec.tolerances.interior_tol * scale
    sf = H.sign_factor

    w_minus, v_minus = _joint_eigh(hm_w, win.window(H.M_minus), cluster_tol)
    w_plus, v_plus = _joint_eigh(hp_w, win.window(H.M_plus), cluster_tol)
    A = H.A.mat
    records = []
    for eps, v in zip(w_minus, v_minus.T):
        phi_m = win.embed(v)
        m_minus = float(np.real(phi_m.conj() @ H.M_minus.mat @ phi_m))
        if eps <= threshold:
            continue
        a_phi = A @ phi_m
        norm2 = float(np.real(a_phi.conj() @ a_phi))
        norm_res = abs(norm2 - 2 * mc2 * eps) / max(1.0, 2 * mc2 * eps)
        phi_p = a_phi / np.sqrt(2 * mc2 * eps)
        map_res = (np.linalg.norm(sys.H_plus.mat @ phi_p - eps * phi_p)
                   / max(np.linalg.norm(phi_p), 1e-300))
        m_plus = float(np.real(phi_p.conj() @ H.M_plus.mat @ phi_p)
                       / np.real(phi_p.conj() @ phi_p))
        records.append(SpectrumRecord(float(eps), m_plus, m_minus,
                                      _energy(m_plus, sf, mc2, eps),
                                      -_energy(m_minus, sf, mc2, eps),
                                      phi_p, phi_m, True, float(map_res), float(norm_res)))

    # Zero modes have no SUSY partner; list those of H+ and H- side by side.
    ker_p = [win.embed(v) for eps, v in zip(w_plus, v_plus.T) if eps <= threshold]
    ker_m = [win.embed(v) for eps, v in zip(w_minus, v_minus.T) if eps <= threshold]
    for k in range(max(len(ker_p), len(ker_m))):
        pp = ker_p[k] if k < len(ker_p) else None
        pm = ker_m[k] if k < len(ker_m) else None
        m_p = float(np.real(pp.conj() @ H.M_plus.mat @ pp)) if pp is not None else float("nan")
        m_m = float(np.real(pm.conj() @ H.M_minus.mat @ pm)) if pm is not None else float("nan")
        records.append(SpectrumRecord(
            0.0, m_p, m_m,
            _energy(m_p, sf, mc2, 0.0) if pp is not None else float("nan"),
            -_energy(m_m, sf, mc2, 0.0) if pm is not None else float("nan"),
            pp, pm, False))
    return SpectrumPair(records, threshold, w_plus, w_minus)


def isospectrality_residual(pair: SpectrumPair) -> float:
    """Max elementwise mismatch of the strictly positive partner spectra."""
    p = np.sort(pair.plus_spectrum[pair.plus_spectrum > pair.threshold])
    m = np.sort(pair.minus_spectrum[pair.minus_spectrum > pair.threshold])
    if len(p) != len(m):
        return float("inf")
    if not len(p):
        return 0.0
    return float(np.max(np.abs(p - m)) / max(1.0, float(np.max(np.abs(p)))))


@dataclass(frozen=True)
class WittenIndex:
    dim_ker_plus: int
    dim_ker_minus: int
    delta: int
    dim_ker_supercharge_sum: int

    @property
    def consistent(self) -> bool:
        return self.dim_ker_supercharge_sum == self.dim_ker_plus + self.dim_ker_minus


def witten_index(sys: SusySystem) -> WittenIndex:
    """Kernel dimensions of ``H+-`` and of ``Q + Q^dag`` on the interior window.

    ``dim ker(Q + Q^dag)`` is counted directly from the singular values of
    ``Q + Q^dag`` restricted to window-supported vectors (columns in the window,
    rows unrestricted), independently of the partner Hamiltonians.
    """
    spec = sys.spec
    kr = spec.tolerances.kernel_rel
    win = spec.window()
    kp = kernel_dim(win.window(sys.H_plus), kr).dim
    km = kernel_dim(win.window(sys.H_minus), kr).dim
    gwin = spec.window(graded=True)
    sc = (sys.Q + sys.Q_dag).mat[:, gwin.indices]
    sv = np.linalg.svd(sc, compute_uv=False)
    top = float(sv[0]) if sv.size and sv[0] > 0 else 1.0
    kq = int(np.sum(sv <= np.sqrt(kr) * top)) + (sc.shape[1] - len(sv))
    return WittenIndex(kp, km, km - kp, kq)


@dataclass
class KernelScan:
    points: list[dict]
    crossings: list[float]
    kernel_points: list[float]


def kernel_scan(spec: ModelSpec, k_z_grid) -> KernelScan:
    """Kernel of ``H+`` along a grid of k_z fibres.

    Zero crossings are located by fitting a parabola through the smallest
    partner eigenvalue at each local minimum; a minimum counts as a crossing
    when the grid point itself has a kernel or the fitted vertex dips to below
    10% of the neighbouring samples.
    """
    grid = np.asarray(k_z_grid, dtype=float)
    points = []
    lam = []
    for kz in grid:
        s = spec.replace(k_z=float(kz))
        sys = build_susy_system(build_model(s))
        hp = s.window().window(sys.H_plus)
        w = np.linalg.eigvalsh(hp)
        k = kernel_dim(hp, s.tolerances.kernel_rel).dim
        points.append({"k_z": float(kz), "dim_ker": k, "lambda_min": float(w[0])})
        lam.append(float(w[0]))
    lam = np.array(lam)
    crossings = []
    for i in range(len(grid)):
        has_kernel = points[i]["dim_ker"] > 0
        if 0 < i < len(grid) - 1 and lam[i] <= lam[i - 1] and lam[i] <= lam[i + 1]:
            x = grid[i - 1:i + 2]
            coef = np.polyfit(x, lam[i - 1:i + 2], 2)
            if coef[0] > 0:
                vertex = -coef[1] / (2 * coef[0])
                vmin = np.polyval(coef, vertex)
                if has_kernel or vmin <= 0.1 * min(lam[i - 1], lam[i + 1]):
                    crossings.append(float(vertex))
                    continue
        if has_kernel:
            crossings.append(float(grid[i]))
    kernel_points = [p["k_z"] for p in points if p["dim_ker"] > 0]
    return KernelScan(points, crossings, kernel_points)
