"""Closed-form Landau-level spectra and the numeric-vs-analytic harness."""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .models import SPIN_OF_CASE, ModelSpec
from .report import CheckReport

MATCH_TOL = 1e-10


class UnmatchedLevel(ValueError):
    """A numeric interior eigenvalue has no analytic level within tolerance."""


@dataclass(frozen=True)
class LevelLabel:
    n: int
    s_z: Fraction | None
    k_z: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("Landau index must be non-negative")


@dataclass(frozen=True)
class RelativisticEnergy:
    value: complex
    supercritical: bool


def spin_projections(case: str) -> list[Fraction]:
    """Allowed s_z in descending order (empty label for the scalar case)."""
    s = SPIN_OF_CASE[case]
    return [s - k for k in range(int(2 * s) + 1)]


def _check_label(case: str, label: LevelLabel) -> float:
    if case == "kg":
        if label.s_z not in (None, 0):
            raise ValueError("kg levels carry no spin projection")
        return 0.0
    if label.s_z is None or Fraction(label.s_z) not in spin_projections(case):
        raise ValueError(f"s_z={label.s_z} invalid for case {case!r}")
    return float(label.s_z)


def nonrel_level(case: str, label: LevelLabel, spec: ModelSpec) -> float:
    """``hbar omega_c (n + 1/2 + s_z) + hbar^2 k_z^2 / 2m``."""
    s_z = _check_label(case, label)
    return (spec.hbar * spec.omega_c * (label.n + 0.5 + s_z)
            + (spec.hbar * label.k_z) ** 2 / (2 * spec.m))


def relativistic_energy(case: str, label: LevelLabel, spec: ModelSpec,
                        branch: int = 1) -> RelativisticEnergy:
    """Relativistic Landau level on the ``branch`` (+1 or -1) of the spectrum.

    All three cases reduce to ``m c^2 sqrt(1 + 2 eps / m c^2)``; for spin 1/2
    and 1 the radicand is written out as
    ``m^2 c^4 + hbar^2 c^2 k_z^2 + 2 m c^2 hbar omega_c (n + 1/2 + s_z)``.
    A negative radicand gives an imaginary value and sets ``supercritical``.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    mc2 = spec.rest_energy
    if case == "kg":
        eps = nonrel_level(case, label, spec)
        radicand = mc2 ** 2 * (1 + 2 * eps / mc2)
    else:
        s_z = _check_label(case, label)
        radicand = (mc2 ** 2 + (spec.hbar * spec.c * label.k_z) ** 2
                    + 2 * mc2 * spec.hbar * spec.omega_c * (label.n + 0.5 + s_z))
    return RelativisticEnergy(branch * cmath.sqrt(radicand), radicand < 0)


def kg_energy_forms(eps_l: float, spec: ModelSpec) -> tuple[float, float, float]:
    """The three equivalent positive Klein-Gordon energy expressions."""
    mc2 = spec.rest_energy
    partner = eps_l ** 2 / (2 * mc2)
    mass = mc2 + eps_l
    return (np.sqrt(mass ** 2 - 2 * mc2 * partner),
            np.sqrt((mc2 + eps_l) ** 2 - eps_l ** 2),
            mc2 * np.sqrt(1 + 2 * eps_l / mc2))


def interior_labels(spec: ModelSpec) -> list[LevelLabel]:
    """Labels whose Landau index lies inside the interior window."""
    n_max = spec.n_fock - spec.buffer
    projections = [None] if spec.case == "kg" else spin_projections(spec.case)
    return [LevelLabel(n, s, spec.k_z) for n in range(n_max) for s in projections]


def label_index(spec: ModelSpec, label: LevelLabel, branch: int) -> int:
    """Index of the basis state for ``label`` in the windowed graded basis."""
    n_win = spec.n_fock - spec.buffer
    s_pos = 0 if label.s_z is None else spin_projections(spec.case).index(Fraction(label.s_z))
    sector = 0 if branch == 1 else 1
    return sector * n_win * spec.spin_dim + label.n * spec.spin_dim + s_pos


@dataclass(frozen=True)
class LevelMatch:
    label: LevelLabel
    branch: int
    numeric: float
    analytic: complex
    epsilon_nonrel: float

    @property
    def abs_error(self) -> float:
        return abs(self.numeric - self.analytic)


def match_levels(numeric, spec: ModelSpec, case: str | None = None, vectors=None,
                 tol: float = MATCH_TOL) -> tuple[list[LevelMatch], list]:
    """Greedy bijective matching of interior eigenvalues to analytic levels.

    ``numeric`` are eigenvalues from the interior window; ``vectors`` (optional,
    columns in windowed graded coordinates) break ties between degenerate
    analytic levels by their weight on the label's basis state.  Returns the
    matches and the analytic candidates left unmatched.
    """
    case = case or spec.case
    candidates = []
    for label in interior_labels(spec):
        eps = nonrel_level(case, label, spec)
        for branch in (1, -1):
            e = relativistic_energy(case, label, spec, branch)
            candidates.append((label, branch, e.value, eps))
    values = np.array([c[2] for c in candidates])
    used = np.zeros(len(candidates), dtype=bool)
    order = np.argsort(np.asarray(numeric, dtype=float), kind="stable")
    matches = []
    for i in order:
        x = float(np.real(numeric[i]))
        dist = np.abs(values - x)
        ok = np.flatnonzero((dist <= tol) & ~used)
        if ok.size == 0:
            raise UnmatchedLevel(f"numeric eigenvalue {x!r} matches no analytic level")
        if vectors is not None and ok.size > 1:
            weights = [abs(vectors[label_index(spec, candidates[j][0], candidates[j][1]), i]) ** 2
                       for j in ok]
            j = ok[int(np.argmax(weights))]
        else:
            j = ok[int(np.argmin(dist[ok]))]
        used[j] = True
        label, branch, value, eps = candidates[j]
        matches.append(LevelMatch(label, branch, x, value, eps))
    leftover = [candidates[j][:2] for j in np.flatnonzero(~used)]
    return matches, leftover


def compare_spectrum(numeric, spec: ModelSpec, case: str | None = None, vectors=None,
                     tol: float = MATCH_TOL) -> CheckReport:
    """Match an interior numeric spectrum against the closed-form levels."""
    matches, leftover = match_levels(numeric, spec, case, vectors, tol)
    worst = max((m.abs_error for m in matches), default=0.0)
    rep = CheckReport()
    rep.add("spectrum_max_abs_error", worst, tol, matched=len(matches))
    rep.add_flag("spectrum_bijective", not leftover, unmatched_labels=len(leftover))
    return rep
