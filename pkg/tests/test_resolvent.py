import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relsusy.models import ModelSpec, assemble_full, build_model, nonrel_hamiltonian
from relsusy.opalg import Operator, ShiftOnSpectrum, op_norm
from relsusy.resolvent import (
    block_resolvent,
    check_shift,
    default_shifts,
    energies,
    first_resolvent_identity,
    iterated_resolvent_blocks,
    nonrel_reduction_check,
)

MODELS = [("kg", {}), ("dirac", {}), ("spin1", {"omega_c": 0.5}), ("spin1", {})]


def test_default_shifts():
    assert default_shifts(2.0) == [1j, -1j, 1 + 1j, 4 + 1j, 0.6j]


def test_dirac_at_i():
    rep = block_resolvent(build_model(ModelSpec("dirac")), 1j)
    assert rep.residual_direct <= 1e-10


def test_kg_at_i_both_residuals():
    rep = block_resolvent(build_model(ModelSpec("kg")), 1j)
    assert rep.residual_direct <= 1e-10
    assert rep.residual_iterated <= 1e-10


def test_kg_at_zero_is_inverse():
    # G(z) = (H - z)^-1, so G(0) = H^-1 with the blocks (z + M+) g+ etc.
    H = build_model(ModelSpec("kg"))
    rep = block_resolvent(H, 0.0)
    assert rep.residual_direct <= 1e-10
    full = assemble_full(H)
    inv = Operator(np.linalg.inv(full.mat), full.basis)
    assert op_norm(rep.G_block - inv) <= 1e-12 * op_norm(inv)


def test_kg_zeta_zero_blocks_are_landau_resolvent():
    spec = ModelSpec("kg", omega_c=0.7, c=1.3)
    g_plus, g_minus = iterated_resolvent_blocks(build_model(spec), 0.0)
    mc2 = spec.rest_energy
    h_l = nonrel_hamiltonian(spec).H_nr
    expected = np.linalg.inv(2 * mc2 * h_l.mat + mc2 ** 2 * np.eye(spec.n_fock))
    for g in (g_plus, g_minus):
        assert np.allclose(g.mat, expected, atol=1e-13)
        assert np.linalg.eigvalsh(g.mat).min() > 0


@pytest.mark.parametrize("case,kw", MODELS)
def test_blocks_invert_their_operators(case, kw):
    H = build_model(ModelSpec(case, **kw))
    zeta = 0.4 + 1j
    g_plus, g_minus = iterated_resolvent_blocks(H, zeta)
    A, Ad, sf = H.A, H.A.dag(), H.sign_factor
    k_plus = H.M_plus @ H.M_plus + (A @ Ad) * sf - zeta
    k_minus = H.M_minus @ H.M_minus + (Ad @ A) * sf - zeta
    eye = np.eye(A.dim)
    assert np.abs((g_plus @ k_plus).mat - eye).max() <= 1e-10
    assert np.abs((g_minus @ k_minus).mat - eye).max() <= 1e-10


def test_dirac_blocks_are_pauli_resolvent():
    spec = ModelSpec("dirac", k_z=0.3)
    zeta = 2.0 + 0.5j
    g_plus, g_minus = iterated_resolvent_blocks(build_model(spec), zeta)
    mc2 = spec.rest_energy
    h_p = nonrel_hamiltonian(spec).H_nr.mat
    expected = np.linalg.inv(2 * mc2 * h_p + (mc2 ** 2 - zeta) * np.eye(h_p.shape[0]))
    win = spec.window()
    for g in (g_plus, g_minus):
        assert np.abs(win.window(Operator(g.mat - expected, spec.basis))).max() <= 1e-12


@pytest.mark.parametrize("case,kw", MODELS)
def test_shift_grid(case, kw):
    spec = ModelSpec(case, **kw)
    H = build_model(spec)
    e = energies(H)
    for z in default_shifts(spec.rest_energy):
        rep = block_resolvent(H, z, e)
        assert rep.passed(1e-10), (z, rep.residual_direct, rep.residual_iterated,
                                   rep.residual_reduction)


@pytest.mark.parametrize("case,kw", MODELS)
def test_reduction_to_nonrel_green_function(case, kw):
    H = build_model(ModelSpec(case, **kw))
    assert nonrel_reduction_check(H, 0.5 + 2j) <= 1e-10


def test_shift_on_spectrum():
    H = build_model(ModelSpec("kg"))
    with pytest.raises(ShiftOnSpectrum):
        block_resolvent(H, np.sqrt(2))
    with pytest.raises(ShiftOnSpectrum):
        check_shift(H, -np.sqrt(2) + 1e-14)


def test_dirac_zero_mode_blocks_zero_shift():
    # dirac has a zero mode pair at +-1, so z = 0 is admissible but z = 1 is not
    H = build_model(ModelSpec("dirac"))
    block_resolvent(H, 0.0)
    with pytest.raises(ShiftOnSpectrum):
        block_resolvent(H, 1.0)


@settings(max_examples=15, deadline=None)
@given(st.floats(-3, 3), st.floats(0.2, 3), st.floats(-3, 3), st.floats(0.2, 3),
       st.sampled_from(["kg", "dirac"]))
def test_first_resolvent_identity(x1, y1, x2, y2, case):
    H = build_model(ModelSpec(case, n_fock=12))
    assert first_resolvent_identity(H, complex(x1, y1), complex(x2, -y2)) <= 1e-10


def test_first_resolvent_identity_spin1():
    H = build_model(ModelSpec("spin1", omega_c=0.5, n_fock=12))
    assert first_resolvent_identity(H, 1j, 0.5 - 2j) <= 1e-10
