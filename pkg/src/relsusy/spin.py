"""Spin matrices for s = 0, 1/2, 1 and the spin-one product identities."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .opalg import BasisTag, Operator, commutator, op_norm
from .report import CheckReport

SUPPORTED_SPINS = (Fraction(0), Fraction(1, 2), Fraction(1))

# Exact finite matrices: only floating-point rounding remains.
EXACT_TOL = 1e-15


@dataclass(frozen=True)
class SpinTriple:
    s: Fraction
    S_1: Operator
    S_2: Operator
    S_3: Operator

    @property
    def components(self):
        return (self.S_1, self.S_2, self.S_3)

    @property
    def dim(self) -> int:
        return self.S_3.dim

    @property
    def projections(self) -> np.ndarray:
        """Diagonal of S_3, descending (s, s-1, ..., -s)."""
        return np.real(np.diag(self.S_3.mat))


def as_spin(s) -> Fraction:
    frac = Fraction(s).limit_denominator(2)
    if frac not in SUPPORTED_SPINS or abs(float(frac) - float(s)) > 1e-12:
        raise ValueError(f"unsupported spin {s}; expected one of 0, 1/2, 1")
    return frac


def spin_matrices(s) -> SpinTriple:
    """Standard spin matrices with S_3 diagonal and descending."""
    s = as_spin(s)
    dim = int(2 * s + 1)
    m = float(s) - np.arange(dim)
    # <m+1|S_+|m> = sqrt(s(s+1) - m(m+1))
    sp = np.zeros((dim, dim))
    for k in range(1, dim):
        sp[k - 1, k] = np.sqrt(float(s) * (float(s) + 1) - m[k] * (m[k] + 1))
    sm = sp.T
    basis = BasisTag(1, dim)
    return SpinTriple(
        s,
        Operator((sp + sm) / 2, basis),
        Operator((sp - sm) / 2j, basis),
        Operator(np.diag(m), basis),
    )


def levi_civita(i: int, j: int, k: int) -> int:
    return int(np.sign((j - i) * (k - i) * (k - j)))


def so3_residuals(S: SpinTriple) -> CheckReport:
    """Commutation relations and Casimir value."""
    rep = CheckReport()
    comps = S.components
    worst = 0.0
    for i, j in itertools.product(range(3), repeat=2):
        rhs = sum((1j * levi_civita(i, j, k)) * comps[k] for k in range(3))
        worst = max(worst, op_norm(commutator(comps[i], comps[j]) - rhs))
    rep.add("so3_commutators", worst, EXACT_TOL)
    casimir = sum((c @ c for c in comps[1:]), comps[0] @ comps[0])
    s = float(S.s)
    rep.add("casimir", op_norm(casimir - s * (s + 1)), EXACT_TOL)
    return rep


def spin1_identity_suite(S: SpinTriple, B_z: float = 1.0) -> CheckReport:
    """Spin-one matrix identities used to simplify the vector-boson operators.

    * ``S_i S_j S_k + S_k S_j S_i = delta_ij S_k + delta_jk S_i`` for all 27 index tuples;
    * ``eps_ijk S_i S_j B_k = i S.B`` with ``B = (0, 0, B_z)``.
    """
    if S.s != 1:
        raise ValueError("spin1_identity_suite needs the s = 1 matrices")
    comps = S.components
    eye = Operator.identity(S.S_3.basis)
    worst = 0.0
    worst_idx = None
    for i, j, k in itertools.product(range(3), repeat=3):
        lhs = comps[i] @ comps[j] @ comps[k] + comps[k] @ comps[j] @ comps[i]
        rhs = eye * 0.0
        if i == j:
            rhs = rhs + comps[k]
        if j == k:
            rhs = rhs + comps[i]
        r = op_norm(lhs - rhs)
        if worst_idx is None or r > worst:
            worst, worst_idx = r, (i + 1, j + 1, k + 1)
    rep = CheckReport()
    rep.add("spin1_symmetrized_triple", worst, EXACT_TOL, worst_index=str(worst_idx))

    B = (0.0, 0.0, B_z)
    lhs = eye * 0.0
    for i, j, k in itertools.product(range(3), repeat=3):
        eps = levi_civita(i, j, k)
        if eps and B[k]:
            lhs = lhs + comps[i] @ comps[j] * (eps * B[k])
    s_dot_b = sum((comps[k] * B[k] for k in range(3)), eye * 0.0)
    rep.add("spin1_epsilon_contraction", op_norm(lhs - 1j * s_dot_b), EXACT_TOL, B_z=B_z)
    return rep
