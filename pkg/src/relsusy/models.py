"""Relativistic spin-0, 1/2 and 1 Hamiltonians in a constant magnetic field.

Each model is stored in block form ``H = [[M+, A], [sf A^dag, -M-]]`` with
``sf = (-1)^(2s+1)`` (-1 for bosons, +1 for fermions).

Unit conversion table (electron, B along +z, omega_c = |eB|/mc):

===========================  ==============================
physical expression          code expression
===========================  ==============================
``e hbar B / c``             ``kappa = -m hbar omega_c``
``-(e hbar/mc) S.B``         ``+hbar omega_c S_3``
``-(g e hbar/2mc) S.B``      ``+(g/2) hbar omega_c S_3``
``((g-2) e hbar/2mc) S.B``   ``-((g-2)/2) hbar omega_c S_3``
``B.pi``                     ``B pi_z``
===========================  ==============================

Polynomials in the kinetic momentum that enter the Hamiltonians are built
exactly on the retained levels: a function of the Landau Hamiltonian uses the
ladder-exact form, and the remaining quadratic forms ((S.pi)^2, (sigma.pi)^2)
are multiplied out on a Fock space padded by ``PAD`` levels and then
compressed.  The resulting blocks are exact compressions of the infinite
operators, which keeps ``[M, A] = 0`` (for g = 2) and the block structure of
``H^2`` intact on the whole truncated space; only products of the blocks
(e.g. ``A^2``) remain sensitive to the truncation edge.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .landau import (
    InteriorProjector,
    interior_projector,
    kinetic_momentum,
    landau_hamiltonian,
    spin_on_fock,
    truncate_fock,
    windowed_residual,
    with_spin,
)
from .opalg import (
    DEFAULT_TOL,
    BasisTag,
    Operator,
    Tolerances,
    anticommutator,
    commutator,
    op_norm,
    rel_residual,
)
from .report import CheckReport
from .spin import spin_matrices

CASES = ("kg", "dirac", "spin1")
SPIN_OF_CASE = {"kg": Fraction(0), "dirac": Fraction(1, 2), "spin1": Fraction(1)}
NONREL_KIND = {"kg": "landau", "dirac": "pauli", "spin1": "vector"}
PAD = 2


@dataclass(frozen=True)
class ModelSpec:
    case: str
    g: float = 2.0
    omega_c: float = 1.0
    k_z: float = 0.0
    m: float = 1.0
    c: float = 1.0
    hbar: float = 1.0
    n_fock: int = 32
    buffer: int = 4
    tolerances: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}, got {self.case!r}")
        if not self.omega_c > 0:
            raise ValueError("omega_c must be positive")
        for name in ("m", "c", "hbar"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not (0 <= self.buffer < self.n_fock):
            raise ValueError("need n_fock > buffer >= 0")
        if self.n_fock < 2:
            raise ValueError("n_fock must be at least 2")

    def replace(self, **changes) -> "ModelSpec":
        return dataclasses.replace(self, **changes)

    @property
    def spin(self) -> Fraction:
        return SPIN_OF_CASE[self.case]

    @property
    def spin_dim(self) -> int:
        return int(2 * self.spin + 1)

    @property
    def sign_factor(self) -> int:
        return 1 if self.spin.denominator == 2 else -1

    @property
    def rest_energy(self) -> float:
        return self.m * self.c ** 2

    @property
    def field_coupling(self) -> float:
        """``e hbar B / c`` for an electron."""
        return -self.m * self.hbar * self.omega_c

    @property
    def larmor_length(self) -> float:
        return float(np.sqrt(self.hbar / (self.m * self.omega_c)))

    @property
    def compton_wavelength(self) -> float:
        return self.hbar / (self.m * self.c)

    @property
    def basis(self) -> BasisTag:
        return BasisTag(self.n_fock, self.spin_dim)

    def window(self, graded: bool = False) -> InteriorProjector:
        return interior_projector(self.n_fock, self.spin_dim, graded, self.buffer)


@dataclass(frozen=True)
class BlockHamiltonian:
    M_plus: Operator
    M_minus: Operator
    A: Operator
    s: Fraction
    sign_factor: int
    spec: ModelSpec | None = None

    @property
    def basis(self) -> BasisTag:
        return self.A.basis

    @property
    def is_fermion(self) -> bool:
        return self.sign_factor == 1

    def mass_graded(self) -> Operator:
        zero = Operator.zeros(self.basis)
        return Operator.from_blocks(self.M_plus, zero, zero, self.M_minus)


@dataclass(frozen=True)
class NonRelHamiltonian:
    kind: str
    H_nr: Operator


@dataclass(frozen=True)
class SupercriticalMargin:
    margin: float  # m c^2 - hbar omega_c; positive means subcritical
    compton_over_larmor: float
    supercritical: bool


def _spin_ops(spec: ModelSpec, n_fock: int):
    S = spin_matrices(spec.spin)
    return [spin_on_fock(c, n_fock) for c in S.components]


def spin_dot_pi(spec: ModelSpec, n_fock: int | None = None) -> Operator:
    """``S.pi`` (raw matrix products on ``n_fock`` levels)."""
    n = spec.n_fock if n_fock is None else n_fock
    pi = kinetic_momentum(n, spec.omega_c, spec.k_z, spec.m, spec.hbar)
    S = _spin_ops(spec, n)
    return sum((s @ with_spin(p, spec.spin_dim) for s, p in zip(S[1:], pi.components()[1:])),
               S[0] @ with_spin(pi.pi_x, spec.spin_dim))


def exact_square(spec: ModelSpec, op_on: callable) -> Operator:
    """Square of a linear-in-pi operator, exact on the retained levels.

    ``op_on(n)`` builds the operator on ``n`` Fock levels; it is squared on a
    padded space and compressed back to ``spec.n_fock``.
    """
    big = op_on(spec.n_fock + PAD)
    return truncate_fock(big @ big, spec.n_fock)


def _landau(spec: ModelSpec) -> Operator:
    hl = landau_hamiltonian(spec.n_fock, spec.omega_c, spec.k_z, spec.m, spec.hbar)
    return with_spin(hl, spec.spin_dim)


def _s3(spec: ModelSpec) -> Operator:
    return _spin_ops(spec, spec.n_fock)[2]


def build_model(spec: ModelSpec) -> BlockHamiltonian:
    mc2 = spec.rest_energy
    if spec.case == "kg":
        hl = _landau(spec)
        M = hl + mc2
        A = hl
    elif spec.case == "dirac":
        # sigma = 2 S for spin 1/2
        A = spin_dot_pi(spec) * (2.0 * spec.c)
        M = Operator.identity(spec.basis) * mc2
    else:
        hl = _landau(spec)
        s3 = _s3(spec)
        sp2 = exact_square(spec, lambda n: spin_dot_pi(spec, n))
        kappa = spec.field_coupling
        M = hl + mc2 - s3 * (spec.g * kappa / (2 * spec.m))
        A = hl - sp2 / spec.m + s3 * ((spec.g - 2) * kappa / (2 * spec.m))
    return BlockHamiltonian(M, M, A, spec.spin, spec.sign_factor, spec)


def grading_operator(basis: BasisTag) -> Operator:
    """``beta = diag(1, -1)`` over the ungraded space."""
    ub = basis.ungraded()
    eye = Operator.identity(ub)
    zero = Operator.zeros(ub)
    return Operator.from_blocks(eye, zero, zero, -eye)


def assemble_full(H: BlockHamiltonian) -> Operator:
    return Operator.from_blocks(H.M_plus, H.A, H.A.dag() * H.sign_factor, -H.M_minus)


def even_odd_decompose(H_full: Operator):
    """Split ``H = beta M + O`` into the even mass operator and the odd part.

    Returns ``(M_even, O_odd)`` with ``[beta, M_even] = 0`` and
    ``{beta, O_odd} = 0``.
    """
    zero = Operator.zeros(H_full.basis.ungraded())
    m_even = Operator.from_blocks(H_full.block(0, 0), zero, zero, -H_full.block(1, 1))
    o_odd = Operator.from_blocks(zero, H_full.block(0, 1), H_full.block(1, 0), zero)
    return m_even, o_odd


def blocks_from_full(H_full: Operator, s, spec: ModelSpec | None = None) -> BlockHamiltonian:
    """Inverse of :func:`assemble_full`."""
    s = Fraction(s).limit_denominator(2)
    sf = 1 if s.denominator == 2 else -1
    m_even, o_odd = even_odd_decompose(H_full)
    return BlockHamiltonian(m_even.block(0, 0), m_even.block(1, 1), o_odd.block(0, 1),
                            s, sf, spec)


def nonrel_hamiltonian(spec: ModelSpec) -> NonRelHamiltonian:
    """The associated non-relativistic Hamiltonian.

    The Pauli Hamiltonian is defined as ``(sigma.pi)^2 / 2m`` rather than by its
    expanded form; the vector-boson one is ``pi^2/2m - (e hbar/mc) S.B``.
    """
    kind = NONREL_KIND[spec.case]
    if kind == "landau":
        h = _landau(spec)
    elif kind == "pauli":
        h = exact_square(spec, lambda n: spin_dot_pi(spec, n) * 2.0) / (2 * spec.m)
    else:
        h = _landau(spec) - _s3(spec) * (spec.field_coupling / spec.m)
    return NonRelHamiltonian(kind, h)


def _energy_scale(spec: ModelSpec) -> float:
    """Squared energy scale of the window: ``(m c^2 + top window Landau level)^2``."""
    n_top = spec.n_fock - spec.buffer - 1
    top = spec.hbar * spec.omega_c * (n_top + 0.5) + (spec.hbar * spec.k_z) ** 2 / (2 * spec.m)
    return (spec.rest_energy + top) ** 2


def mo_commutator_norm(H: BlockHamiltonian) -> float:
    """Windowed norm of ``M+ A - A M-`` and ``A^dag M+ - M- A^dag``.

    Normalised by the g-independent squared energy scale of the window so the
    value is linear in ``|g - 2|`` for the spin-one model.
    """
    spec = H.spec
    win = spec.window()
    r1 = H.M_plus @ H.A - H.A @ H.M_minus
    r2 = H.A.dag() @ H.M_plus - H.M_minus @ H.A.dag()
    num = max(op_norm(win.window(r1)), op_norm(win.window(r2)))
    return num / max(1.0, _energy_scale(spec))


def mo_commutator_oracle(spec: ModelSpec) -> Operator:
    """Closed-form ``[M, A] = (g-2) (e hbar / 2 m^2 c) [S.B, (S.pi)^2]``,
    evaluated from raw kinetic-momentum products."""
    if spec.case != "spin1":
        return Operator.zeros(spec.basis)
    sp = spin_dot_pi(spec)
    coef = (spec.g - 2) * spec.field_coupling / (2 * spec.m ** 2)
    return commutator(_s3(spec), sp @ sp) * coef


def mo_oracle_norm(spec: ModelSpec) -> float:
    """Windowed norm of :func:`mo_commutator_oracle`, same normalisation as
    :func:`mo_commutator_norm`."""
    win = spec.window()
    return op_norm(win.window(mo_commutator_oracle(spec))) / max(1.0, _energy_scale(spec))


def _windowed_check(rep: CheckReport, name: str, lhs: Operator, rhs: Operator,
                    win: InteriorProjector, tol: float) -> None:
    diff = lhs - rhs
    rep.add(name, windowed_residual(diff, lhs, win), tol,
            unwindowed=rel_residual(diff, lhs), buffer=win.buffer)


def pi_identity_suite(spec: ModelSpec) -> CheckReport:
    """Kinetic-momentum identities evaluated with raw truncated products.

    Every entry is judged on the interior window; the unwindowed residual is
    kept in the context to show the truncation edge is really corrupted.
    """
    tol = spec.tolerances.interior_tol
    rep = CheckReport()
    pi = kinetic_momentum(spec.n_fock, spec.omega_c, spec.k_z, spec.m, spec.hbar)
    kappa = spec.field_coupling
    fwin = interior_projector(spec.n_fock, 1, False, spec.buffer)
    comps = pi.components()
    eye = Operator.identity(comps[0].basis)
    worst, worst_full, worst_pair = 0.0, 0.0, None
    for k in range(3):
        for l in range(3):
            # [pi_k, pi_l] = i (e hbar / c) eps_klm B_m with B along z
            eps = {(0, 1): 1, (1, 0): -1}.get((k, l), 0)
            diff = commutator(comps[k], comps[l]) - eye * (1j * kappa * eps)
            r = windowed_residual(diff, eye * kappa, fwin)
            if worst_pair is None or r > worst:
                worst, worst_pair = r, f"{k + 1}{l + 1}"
            worst_full = max(worst_full, rel_residual(diff, eye * kappa))
    rep.add("pi_commutator", worst, tol, unwindowed=worst_full, worst_pair=worst_pair,
            buffer=spec.buffer)

    win = spec.window()
    if spec.case == "dirac":
        sig_pi = spin_dot_pi(spec) * 2.0
        sig3 = _s3(spec) * 2.0
        pi2 = with_spin(pi.squared(), 2)
        # (sigma.pi)^2 = pi^2 - (e hbar / c) sigma.B
        _windowed_check(rep, "pauli_square", sig_pi @ sig_pi, pi2 - sig3 * kappa, win, tol)
    if spec.case != "spin1":
        return rep

    sp = spin_dot_pi(spec)
    sp2 = sp @ sp
    s3 = _s3(spec)
    pi2 = with_spin(pi.squared(), 3)
    pz = with_spin(pi.pi_z, 3)
    _windowed_check(rep, "pi2_commutes_Spi", commutator(pi2, sp),
                    commutator(s3, sp) * (2 * kappa), win, tol)
    _windowed_check(rep, "pi2_commutes_Spi2", commutator(pi2, sp2),
                    commutator(s3, sp2) * (2 * kappa), win, tol)
    _windowed_check(rep, "df_quartic", sp2 @ sp2,
                    (pi2 - s3 * (2 * kappa)) @ sp2 + pz @ sp * kappa, win, tol)
    _windowed_check(rep, "df_anticommutator", anticommutator(s3, sp2),
                    (pi2 - s3 * kappa) @ s3 + pz @ sp, win, tol)
    a_g2 = pi2 / (2 * spec.m) - sp2 / spec.m
    h_v = pi2 / (2 * spec.m) - s3 * (kappa / spec.m)
    _windowed_check(rep, "A2_equals_HV2", a_g2 @ a_g2, h_v @ h_v, win, tol)
    return rep


def supercritical_margin(spec: ModelSpec) -> SupercriticalMargin:
    """``m c^2 - hbar omega_c`` and ``lambda_C / lambda_L`` for the spin-one model."""
    if spec.case != "spin1":
        raise ValueError("supercritical_margin applies to the spin-one model")
    margin = spec.rest_energy - spec.hbar * spec.omega_c
    return SupercriticalMargin(margin, spec.compton_wavelength / spec.larmor_length,
                               margin < 0)


def nonrel_graded(spec: ModelSpec) -> Operator:
    """``diag(H_NR, H_NR)``."""
    h = nonrel_hamiltonian(spec).H_nr
    zero = Operator.zeros(h.basis)
    return Operator.from_blocks(h, zero, zero, h)


def energy_momentum_residual(H: BlockHamiltonian) -> float:
    """Windowed residual of ``H^2 = m^2 c^4 + 2 m c^2 diag(H_NR, H_NR)``."""
    spec = H.spec
    full = assemble_full(H)
    h2 = full @ full
    mc2 = spec.rest_energy
    rhs = nonrel_graded(spec) * (2 * mc2) + mc2 ** 2
    return windowed_residual(h2 - rhs, h2, spec.window(graded=True))
