"""Model constructors against brute-force enumeration and each other."""

import math

import numpy as np
import pytest

from bellcav import model
from bellcav.exceptions import PoleError
from bellcav.model import Modulation, ScaledParameters, SystemParameters


def caption(theta=math.pi, modulation=None):
    return model.from_scaled(ScaledParameters(), theta,
                             modulation or Modulation.tan())


# ---------------------------------------------------------------- f_value

def test_f_tan_at_pi_is_zero():
    assert abs(model.f_value(Modulation.tan(), math.pi)) < 1e-12


def test_f_negcot_at_half_pi_is_zero():
    assert abs(model.f_value(Modulation.negcot(), math.pi / 2)) < 1e-12


def test_f_negcot_quarter_pi():
    assert model.f_value(Modulation.negcot(), math.pi / 4) == pytest.approx(-1.0)


def test_f_fixed():
    assert model.f_value(Modulation.fixed(0.7), 1.23) == 0.7


@pytest.mark.parametrize("modulation,theta", [
    (Modulation.tan(), math.pi / 2),
    (Modulation.tan(), 3 * math.pi / 2 + 5e-7),
    (Modulation.negcot(), 0.0),
    (Modulation.negcot(), math.pi - 5e-7),
])
def test_f_pole_guard(modulation, theta):
    with pytest.raises(PoleError):
        model.f_value(modulation, theta)


def test_modulation_parse_roundtrip():
    assert Modulation.parse("tan") == Modulation.tan()
    assert Modulation.parse("negcot") == Modulation.negcot()
    assert Modulation.parse("fixed:-0.5") == Modulation.fixed(-0.5)
    with pytest.raises(ValueError):
        Modulation.parse("cosine")


# ---------------------------------------------------------------- scaling

def test_from_scaled_caption_point():
    p = caption()
    assert (p.g, p.delta, p.Delta) == (1.0, 0.5, 2.0)
    assert p.kappa == pytest.approx(0.1)
    assert p.gamma == pytest.approx(0.05)
    assert p.Omega == pytest.approx(0.01)


def test_from_scaled_all_ones():
    s = ScaledParameters(alpha=1, x=1, tilde_delta=1, tilde_Delta=1,
                         tilde_kappa=1, tilde_gamma=1, tilde_Omega=1)
    p = model.from_scaled(s, 0.3, Modulation.tan())
    assert (p.g, p.delta, p.Delta, p.kappa, p.gamma, p.Omega) == (1,) * 6


def test_caption_cooperativity_is_200():
    p = caption()
    assert p.g ** 2 / (p.kappa * p.gamma) == pytest.approx(200.0)


def test_parameter_invariants():
    with pytest.raises(ValueError):
        SystemParameters(g=0, delta=0, Delta=1, kappa=0.1, gamma=0.1,
                         Omega=0.01, theta=1.0, modulation=Modulation.tan())
    with pytest.raises(ValueError):
        SystemParameters(g=1, delta=0, Delta=1, kappa=-0.1, gamma=0.1,
                         Omega=0.01, theta=1.0, modulation=Modulation.tan())
    with pytest.raises(ValueError):
        SystemParameters(g=1, delta=0, Delta=1, kappa=0.1, gamma=0.1,
                         Omega=0.01, theta=1.0, modulation=Modulation.tan(),
                         gamma0=0.09, gamma1=0.02)


def test_scaled_parameter_invariants():
    with pytest.raises(ValueError):
        ScaledParameters(alpha=0.0)
    with pytest.raises(ValueError):
        ScaledParameters(x=-1.0)
    with pytest.raises(ValueError):
        ScaledParameters(tilde_kappa=-0.5)


def test_weak_driving_flag():
    assert caption().weak_driving_ok()
    strong = model.from_scaled(ScaledParameters(tilde_Omega=5.0), math.pi,
                               Modulation.tan())
    assert not strong.weak_driving_ok()


# ------------------------------------------------------- bare operators

def enumeration_oracle(p: SystemParameters) -> dict[str, np.ndarray]:
    """Entry-by-entry construction over the 18 product states."""
    f = p.f()
    states = [(a1, a2, c) for a1 in range(3) for a2 in range(3)
              for c in range(2)]
    index = {s: i for i, s in enumerate(states)}
    E = 2

    def mat():
        return np.zeros((18, 18), dtype=np.complex128)

    H_e, H_ac, W = mat(), mat(), mat()
    L = [mat() for _ in range(5)]
    for (a1, a2, c) in states:
        col = index[(a1, a2, c)]
        H_e[col, col] = p.Delta * ((a1 == E) + (a2 == E)) + p.delta * c
        if c == 1 and a1 == 1:
            H_ac[index[(E, a2, 0)], col] += p.g
        if c == 1 and a2 == 1:
            H_ac[index[(a1, E, 0)], col] += p.g
        if a1 == 0:
            W[index[(E, a2, c)], col] = p.Omega / 2
        if a2 == 0:
            W[index[(a1, E, c)], col] += f * p.Omega / 2
        if c == 1:
            L[0][index[(a1, a2, 0)], col] = math.sqrt(p.kappa)
        if a1 == E:
            L[1][index[(0, a2, c)], col] = math.sqrt(p.gamma_to_0)
            L[3][index[(1, a2, c)], col] = math.sqrt(p.gamma_to_1)
        if a2 == E:
            L[2][index[(a1, 0, c)], col] = math.sqrt(p.gamma_to_0)
            L[4][index[(a1, 1, c)], col] = math.sqrt(p.gamma_to_1)
    H_ac = H_ac + H_ac.conj().T
    return {"H_e": H_e + H_ac, "H_ac": H_ac, "W_plus": W,
            "W_minus": W.conj().T, "L": L}


def test_bare_operators_match_enumeration(random_params):
    for _ in range(20):
        p = random_params()
        built = model.build_bare_operators(p)
        oracle = enumeration_oracle(p)
        for name in ("H_e", "H_ac", "W_plus", "W_minus"):
            assert np.abs(getattr(built, name) - oracle[name]).max() < 1e-15
        for a, b in zip(built.L, oracle["L"]):
            assert np.abs(a - b).max() < 1e-15


def test_drive_matrix_element():
    p = caption(theta=1.1)
    ops = model.build_bare_operators(p)
    bra = model.computational_ket(2, 0, 0)
    ket = model.computational_ket(0, 0, 0)
    assert bra.conj() @ ops.W_plus @ ket == pytest.approx(p.Omega / 2)


def test_cavity_loss_annihilates_vacuum():
    ops = model.build_bare_operators(caption())
    for a1 in range(3):
        for a2 in range(3):
            assert np.abs(ops.L[0] @ model.computational_ket(a1, a2, 0)).max() == 0


def test_structural_invariants(random_params):
    for _ in range(10):
        p = random_params()
        ops = model.build_bare_operators(p)
        assert np.array_equal(ops.W_minus, ops.W_plus.conj().T)
        assert np.abs(ops.H_e - ops.H_e.conj().T).max() == 0
        for L in ops.L:
            assert np.abs(L.imag).max() == 0
        for L in ops.L[1:]:
            nonzero_per_col = (np.abs(L) > 0).sum(axis=0)
            assert nonzero_per_col.max() <= 1


# ---------------------------------------------------------------- basis

def test_basis_theta_zero_psi_plus():
    basis = model.build_basis_B(0.0)
    assert np.array_equal(basis.isometry[:, 1], model.computational_ket(1, 0, 0))


def test_basis_quarter_pi_bell_state():
    basis = model.build_basis_B(math.pi / 4)
    expected = (model.computational_ket(1, 0, 0)
                + model.computational_ket(0, 1, 0)) / math.sqrt(2)
    assert np.allclose(basis.isometry[:, 1], expected, atol=1e-15)


def test_basis_isometry_random_angles(rng):
    for theta in rng.uniform(0, 2 * math.pi, size=50):
        V = model.build_basis_B(theta).isometry
        assert np.abs(V.conj().T @ V - np.eye(12)).max() < 1e-12


def test_basis_excitation_block_structure():
    V = model.build_basis_B(0.7).isometry
    excitations = np.array(
        [(a1 == 2) + (a2 == 2) + c for a1 in range(3) for a2 in range(3)
         for c in range(2)])
    for col, want in zip(range(12), [0] * 4 + [1] * 8):
        support = np.abs(V[:, col]) > 0
        assert set(excitations[support]) == {want}
    # columns 4-7 atomic, 8-11 photonic
    photon = np.array([c for _ in range(3) for _ in range(3) for c in range(2)])
    for col in range(4, 8):
        assert photon[np.abs(V[:, col]) > 0].max() == 0
    for col in range(8, 12):
        assert photon[np.abs(V[:, col]) > 0].min() == 1


# ------------------------------------------------------- basis-B operators

def test_project_identity():
    basis = model.build_basis_B(1.3)
    assert np.allclose(model.project_to_B(np.eye(18), basis), np.eye(12),
                       atol=1e-14)


def test_appendix_emission_element(random_params):
    p = random_params()
    ops = model.appendix_operators(p)
    expected = math.sqrt(p.gamma_to_0) * math.cos(p.theta)
    assert ops.L[1][model.G00, model.A0P] == pytest.approx(expected, abs=1e-15)


def test_appendix_theta_zero_element():
    p = caption(theta=0.0, modulation=Modulation.fixed(0.3))
    ops = model.appendix_operators(p)
    assert ops.L[3][model.G11, model.A1P] == pytest.approx(
        math.sqrt(p.gamma / 2), abs=1e-15)


def test_appendix_matches_projection(random_params):
    worst = 0.0
    for _ in range(50):
        p = random_params()
        direct = model.appendix_operators(p)
        projected = model.project_operator_set(
            model.build_bare_operators(p), model.build_basis_B(p.theta))
        for name in ("H_e", "H_ac", "W_plus", "W_minus"):
            a, b = getattr(direct, name), getattr(projected, name)
            scale = max(np.abs(a).max(), np.abs(b).max())
            worst = max(worst, np.abs(a - b).max() / scale)
        for a, b in zip(direct.L, projected.L):
            scale = max(np.abs(a).max(), np.abs(b).max())
            worst = max(worst, np.abs(a - b).max() / scale)
    assert worst <= 1e-12


def test_appendix_matches_projection_unequal_split():
    p = SystemParameters(g=1.2, delta=0.4, Delta=1.9, kappa=0.2, gamma=0.06,
                         Omega=0.02, theta=0.9, modulation=Modulation.tan(),
                         gamma0=0.04, gamma1=0.02)
    direct = model.appendix_operators(p)
    projected = model.project_operator_set(
        model.build_bare_operators(p), model.build_basis_B(p.theta))
    for a, b in zip(direct.L, projected.L):
        assert np.abs(a - b).max() <= 1e-14


def test_basis_b_jump_operators_real(random_params):
    # real entries in basis B are what make H_NH complex symmetric
    for _ in range(5):
        ops = model.appendix_operators(random_params())
        for L in ops.L:
            assert np.abs(L.imag).max() == 0


def test_double_flip_state_is_trapped():
    ops = model.build_bare_operators(caption(theta=0.8))
    trapped = model.computational_ket(1, 1, 0)
    assert np.abs(ops.W_plus @ trapped).max() == 0
    assert np.abs(ops.H_ac @ trapped).max() == 0
    for L in ops.L:
        assert np.abs(L @ trapped).max() == 0
