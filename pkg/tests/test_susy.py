from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from relsusy.models import BlockHamiltonian, ModelSpec, build_model
from relsusy.opalg import NegativeSpectrum, Operator, hermiticity_residual, op_norm
from relsusy.susy import (
    build_susy_system,
    isospectrality_residual,
    kernel_scan,
    partner_spectrum_map,
    verify_susy_algebra,
    witten_index,
)

CASES = ("kg", "dirac", "spin1")


def _system(case, **kw):
    H = build_model(ModelSpec(case, **kw))
    return build_susy_system(H), H


@pytest.mark.parametrize("case", CASES)
def test_algebra_at_defaults(case):
    sys_, H = _system(case)
    rep = verify_susy_algebra(sys_, H)
    assert len(rep) == 10
    assert rep.overall_pass, rep.summary()


def test_dirac_algebra_away_from_defaults():
    sys_, H = _system("dirac", k_z=-0.8, omega_c=2.3, m=0.7, c=1.9)
    assert verify_susy_algebra(sys_, H).overall_pass


def test_q_squares_to_zero_exactly():
    sys_, _ = _system("spin1", k_z=0.3)
    assert op_norm(sys_.Q @ sys_.Q) == 0.0
    assert op_norm(sys_.Q_dag @ sys_.Q_dag) == 0.0
    assert op_norm(sys_.Q @ sys_.W + sys_.W @ sys_.Q) == 0.0


def test_witten_parity_is_beta():
    sys_, _ = _system("kg")
    assert np.array_equal(sys_.W.mat, np.diag([1.0] * 32 + [-1.0] * 32))
    assert np.array_equal((sys_.W @ sys_.W).mat, np.eye(64))


def test_partner_hamiltonians_hermitian_psd():
    for case in CASES:
        sys_, _ = _system(case, k_z=0.4)
        for h in (sys_.H_plus, sys_.H_minus):
            assert hermiticity_residual(h) <= 1e-12
            assert np.linalg.eigvalsh(h.mat).min() >= -1e-12 * op_norm(h)


def test_kg_partner_is_landau_squared():
    spec = ModelSpec("kg", omega_c=0.9, k_z=0.2)
    sys_, _ = _system("kg", omega_c=0.9, k_z=0.2)
    levels = 0.9 * (np.arange(spec.n_fock) + 0.5) + 0.02
    assert np.allclose(np.diag(sys_.H_plus.mat).real, levels ** 2 / 2, atol=1e-12)


def test_hsusy_block_form():
    sys_, H = _system("dirac", k_z=0.5)
    blocks = sys_.H_susy
    A = H.A
    assert op_norm(blocks.block(0, 0) - A @ A.dag() / 2.0) <= 1e-12 * op_norm(blocks)
    assert op_norm(blocks.block(1, 1) - A.dag() @ A / 2.0) <= 1e-12 * op_norm(blocks)


def test_center_broken_for_g3():
    sys_, H = _system("spin1", g=3.0)
    rep = verify_susy_algebra(sys_, H)
    assert rep["center_M_Q"].residual > 1e-10


@pytest.mark.parametrize("case", CASES)
def test_partner_map(case):
    kw = {"omega_c": 0.5} if case == "spin1" else {}
    sys_, H = _system(case, **kw)
    pair = partner_spectrum_map(sys_, H)
    assert pair.max_map_residual <= 1e-10
    assert pair.max_norm_residual <= 1e-10
    assert pair.max_mass_mismatch() <= 1e-10
    assert isospectrality_residual(pair) <= 1e-10
    for r in pair.records:
        if r.paired:
            assert np.linalg.norm(r.phi_plus) == pytest.approx(1.0, abs=1e-10)


def test_kg_lowest_energies():
    sys_, H = _system("kg")
    pair = partner_spectrum_map(sys_, H)
    low = min(pair.records, key=lambda r: r.epsilon)
    assert low.epsilon == pytest.approx(0.125)
    assert low.E_plus == pytest.approx(np.sqrt(2), abs=1e-12)
    assert low.E_minus == pytest.approx(-np.sqrt(2), abs=1e-12)


def test_spin1_zero_mode_energies():
    sys_, H = _system("spin1", k_z=1.0)
    pair = partner_spectrum_map(sys_, H)
    zero = [r for r in pair.records if not r.paired]
    assert len(zero) == 1
    assert zero[0].E_plus == pytest.approx(1.0, abs=1e-12)
    assert zero[0].E_minus == pytest.approx(-1.0, abs=1e-12)


def test_supercritical_partner_map_raises():
    sys_, H = _system("spin1", omega_c=2.0)
    with pytest.raises(NegativeSpectrum):
        partner_spectrum_map(sys_, H)


def test_witten_kg_broken():
    wi = witten_index(_system("kg")[0])
    assert (wi.dim_ker_plus, wi.dim_ker_minus, wi.delta) == (0, 0, 0)
    assert wi.consistent


def test_witten_dirac_zero_mode():
    wi = witten_index(_system("dirac")[0])
    assert (wi.dim_ker_plus, wi.dim_ker_minus, wi.delta) == (1, 1, 0)
    assert wi.dim_ker_supercharge_sum == 2


def test_witten_spin1_at_larmor_momentum():
    spec = ModelSpec("spin1")
    wi = witten_index(_system("spin1", k_z=1.0 / spec.larmor_length)[0])
    assert wi.delta == 0 and wi.dim_ker_plus >= 1 and wi.consistent


def test_scan_spin1_crossings():
    scan = kernel_scan(ModelSpec("spin1"), np.linspace(-2, 2, 81))
    assert scan.kernel_points == [-1.0, 1.0]
    assert len(scan.crossings) == 2
    assert min(abs(abs(x) - 1.0) for x in scan.crossings) <= 0.05


def test_scan_off_grid_still_finds_crossings():
    scan = kernel_scan(ModelSpec("spin1", n_fock=12), np.linspace(-2, 2, 40))
    assert scan.kernel_points == []
    assert sorted(round(x, 1) for x in scan.crossings) == [-1.0, 1.0]


def test_scan_kg_has_no_zeros():
    scan = kernel_scan(ModelSpec("kg", n_fock=12), np.linspace(-2, 2, 21))
    assert scan.crossings == [] and scan.kernel_points == []


def test_scan_dirac_zero_at_origin():
    scan = kernel_scan(ModelSpec("dirac", n_fock=12), np.linspace(-1, 1, 21))
    assert scan.kernel_points == [0.0]
    assert scan.crossings == pytest.approx([0.0], abs=1e-12)


# -- random SUSY pairs ---------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(
    st.just(n), arrays(np.float64, (2 * n, 2 * n), elements=st.floats(-2, 2)),
    arrays(np.float64, (2 * n, 2 * n), elements=st.floats(-2, 2)))))
def test_random_pair_is_isospectral(data):
    n, re, im = data
    spec = ModelSpec("dirac", n_fock=n, buffer=0)
    A = Operator(re + 1j * im, spec.basis)
    M = Operator.identity(spec.basis) * spec.rest_energy
    H = BlockHamiltonian(M, M, A, Fraction(1, 2), 1, spec)
    sys_ = build_susy_system(H)
    assert verify_susy_algebra(sys_, H).overall_pass
    pair = partner_spectrum_map(sys_, H)
    scale = max(1.0, op_norm(sys_.H_plus))
    assert isospectrality_residual(pair) <= 1e-10
    assert pair.max_map_residual <= 1e-10 * scale
    assert witten_index(sys_).consistent
