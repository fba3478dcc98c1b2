"""Elimination engine: scalars, three-way inversion, effective operators."""

import math

import numpy as np
import pytest

from bellcav import effective, linalg, model
from bellcav.exceptions import DegeneratePropagatorError, SingularBlockError
from bellcav.model import Modulation, ScaledParameters

CAPTION = model.from_scaled(ScaledParameters(), math.pi, Modulation.tan())


def scalar_oracle(p):
    """Both defining formulas evaluated independently of the module."""
    dg = complex(p.Delta, -p.gamma / 2)
    dk = complex(p.delta, -p.kappa / 2)
    d = {n: dg * dk - n * p.g ** 2 for n in (0, 1, 2)}
    d_tilde = {n: 4 * n * p.g ** 2
               + complex(p.gamma, 2 * p.Delta) * complex(p.kappa, 2 * p.delta)
               for n in (0, 1, 2)}
    return d, d_tilde


# ---------------------------------------------------------------- H_NH

def test_hnh_complex_symmetric(random_params):
    for _ in range(10):
        h = effective.build_H_NH(random_params())
        assert np.abs(h - h.T).max() == 0


def test_hnh_photon_diagonal():
    h = effective.build_H_NH(CAPTION)
    # local index 4 is the empty-atom photon state; only cavity loss decays it
    assert h[4, 4] == pytest.approx(CAPTION.delta - 0.5j * CAPTION.kappa, abs=1e-15)


def test_hnh_atomic_diagonal():
    h = effective.build_H_NH(CAPTION)
    for i in range(4):
        assert h[i, i] == pytest.approx(CAPTION.Delta - 0.5j * CAPTION.gamma,
                                        abs=1e-15)


# ---------------------------------------------------------------- scalars

def test_caption_scalar_values():
    sc = effective.propagator_scalars(CAPTION)
    assert sc.d_tilde[1] == pytest.approx(0.005 + 0.45j, abs=1e-14)
    assert sc.d[1] == pytest.approx(-0.00125 - 0.1125j, abs=1e-14)
    d, d_tilde = scalar_oracle(CAPTION)
    for n in (0, 1, 2):
        assert sc.d[n] == pytest.approx(d[n], abs=1e-15)
        assert sc.d_tilde[n] == pytest.approx(d_tilde[n], abs=1e-15)
        assert abs(-4 * sc.d[n] - sc.d_tilde[n]) <= 1e-12 * abs(sc.d_tilde[n])


def test_intermediate_propagator_hierarchy():
    # with the detunings engineered to dd~ = 1 the first propagator
    # denominator collapses and the second stays O(4 g^2)
    sc = effective.propagator_scalars(CAPTION)
    d, d_tilde = scalar_oracle(CAPTION)
    ratio = abs(sc.d_tilde[2]) / abs(sc.d_tilde[1])
    assert ratio == pytest.approx(abs(d_tilde[2]) / abs(d_tilde[1]), rel=1e-12)
    assert ratio > 8.0


def test_scalar_identity_random(random_params):
    for _ in range(200):
        sc = effective.propagator_scalars(random_params())
        for n in (0, 1, 2):
            assert abs(-4 * sc.d[n] - sc.d_tilde[n]) <= 1e-12 * abs(sc.d_tilde[n])


def test_degenerate_propagator_raises():
    # delta = Delta = kappa = gamma = 0 makes d_0 exactly zero
    p = model.SystemParameters(g=1, delta=0, Delta=0, kappa=0, gamma=0,
                               Omega=0.01, theta=1.0, modulation=Modulation.tan())
    with pytest.raises(DegeneratePropagatorError):
        effective.propagator_scalars(p)


# ---------------------------------------------------------------- blocks

def test_banachiewicz_decoupled_blocks():
    # a block-diagonal complex-symmetric matrix: off-blocks vanish and the
    # diagonal blocks invert independently
    rng = np.random.default_rng(5)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    a = a + a.T + 5 * np.eye(4)
    d = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    d = d + d.T + 5 * np.eye(4)
    h = np.block([[a, np.zeros((4, 4))], [np.zeros((4, 4)), d]])
    blocks = effective.banachiewicz_invert(h)
    assert np.allclose(blocks.A_hat, linalg.invert(a), atol=1e-12)
    assert np.allclose(blocks.D_hat, linalg.invert(d), atol=1e-12)
    assert np.abs(blocks.B_hat).max() == 0
    assert np.abs(blocks.C_hat).max() == 0


def test_banachiewicz_against_lu(caption_params):
    h = effective.build_H_NH(caption_params)
    assembled = effective.banachiewicz_invert(h).assembled()
    assert np.linalg.norm(h @ assembled - np.eye(8)) <= 1e-12
    assert np.abs(assembled - linalg.invert(h)).max() <= 1e-12


def test_banachiewicz_symmetry(random_params):
    for _ in range(20):
        p = random_params()
        blocks = effective.banachiewicz_invert(effective.build_H_NH(p))
        scale = 1 / abs(effective.propagator_scalars(p).d[1])
        assert np.abs(blocks.C_hat - blocks.B_hat.T).max() <= 1e-12 * scale


def test_banachiewicz_singular_block_named():
    h = np.zeros((8, 8), dtype=complex)
    h[4:, 4:] = np.eye(4)
    with pytest.raises(SingularBlockError, match="atomic"):
        effective.banachiewicz_invert(h)


def test_closed_blocks_structure(caption_params):
    sc = effective.propagator_scalars(caption_params)
    blocks = effective.closed_form_blocks(caption_params)
    assert blocks.D_hat[0, 0] == sc.R[0]
    assert blocks.D_hat[3, 3] == sc.R[2]
    assert blocks.B_hat[0, 1] == pytest.approx(-caption_params.g / sc.d[1])


def test_closed_blocks_match_banachiewicz(random_params):
    worst = 0.0
    for _ in range(50):
        p = random_params()
        closed = effective.closed_form_blocks(p).assembled()
        numeric = effective.banachiewicz_invert(effective.build_H_NH(p)).assembled()
        scale = 1 / abs(effective.propagator_scalars(p).d[1])
        worst = max(worst, np.abs(closed - numeric).max() / scale)
    assert worst <= 1e-10


# ----------------------------------------------------- effective model

def test_effective_annihilates_double_flip(random_params):
    for _ in range(10):
        m = effective.derive_effective_model(random_params())
        for L in m.L_eff:
            assert np.abs(L[:, model.G11]).max() == 0
        assert np.abs(m.H_eff[:, model.G11]).max() <= 1e-12
        assert np.abs(m.H_eff[model.G11, :]).max() <= 1e-12


def test_effective_hamiltonian_hermitian(random_params):
    for _ in range(10):
        m = effective.derive_effective_model(random_params())
        dev = np.linalg.norm(m.H_eff - m.H_eff.conj().T)
        assert dev <= 1e-12 * max(np.linalg.norm(m.H_eff), 1e-300)


def test_target_is_dark_at_optimum():
    m = effective.derive_effective_model(CAPTION)
    scale = max(np.abs(L).max() for L in m.L_eff)
    for L in m.L_eff:
        assert np.abs(L[:, model.GPLUS]).max() <= 1e-12 * scale
    assert np.abs(m.H_eff[:, model.GPLUS]).max() <= 1e-12 * np.abs(m.H_eff).max() + 1e-30


def test_selection_rule_closed_form():
    for theta in np.linspace(0.1, 2 * math.pi - 0.1, 40):
        if abs(math.remainder(theta - math.pi / 2, math.pi)) < 0.05:
            continue
        p = model.from_scaled(ScaledParameters(), theta, Modulation.tan())
        L1 = effective.closed_form_effective(p)[0]
        assert abs(L1[model.GMINUS, model.G00]) <= 1e-14 * np.abs(L1).max()
    for theta in np.linspace(0.1, 2 * math.pi - 0.1, 40):
        if abs(math.remainder(theta, math.pi)) < 0.05:
            continue
        p = model.from_scaled(ScaledParameters(), theta, Modulation.negcot())
        L1 = effective.closed_form_effective(p)[0]
        assert abs(L1[model.GPLUS, model.G00]) <= 1e-14 * np.abs(L1).max()


def test_closed_effective_matches_numeric(random_params):
    worst = 0.0
    for _ in range(50):
        p = random_params()
        closed = effective.closed_form_effective(p)
        numeric = effective.derive_effective_model(p).L_eff
        for a, b in zip(closed, numeric):
            scale = max(np.abs(a).max(), np.abs(b).max())
            worst = max(worst, np.abs(a - b).max() / scale)
    assert worst <= 1e-10


def test_closed_effective_unequal_split():
    p = model.SystemParameters(g=1.1, delta=0.5, Delta=2.1, kappa=0.15,
                               gamma=0.05, Omega=0.01, theta=2.4,
                               modulation=Modulation.negcot(),
                               gamma0=0.035, gamma1=0.015)
    closed = effective.closed_form_effective(p)
    numeric = effective.derive_effective_model(p).L_eff
    for a, b in zip(closed, numeric):
        assert np.abs(a - b).max() <= 1e-12 * max(np.abs(a).max(), 1e-300)


def test_in_amplitude_exceeds_out_amplitude_at_optimum():
    for modulation, target in ((Modulation.tan(), model.GPLUS),
                               (Modulation.negcot(), model.GMINUS)):
        p = model.from_scaled(ScaledParameters(), modulation.target_angle,
                              modulation)
        L1 = effective.closed_form_effective(p)[0]
        assert abs(L1[target, model.G00]) > np.abs(L1[:, target]).max()
