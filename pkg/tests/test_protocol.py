"""Channel amplitudes, regime grading, detuning engineering, cooperativity."""

import math

import numpy as np
import pytest

from bellcav import effective, model, protocol
from bellcav.model import Modulation, ScaledParameters


def params(theta, modulation):
    return model.from_scaled(ScaledParameters(), theta, modulation)


def amplitudes(theta, modulation):
    return protocol.channel_amplitudes(
        effective.derive_effective_model(params(theta, modulation)))


# ------------------------------------------------------------ amplitudes

def test_tan_blocks_unwanted_target():
    for theta in np.linspace(0.1, 2 * math.pi - 0.1, 25):
        if abs(math.remainder(theta - math.pi / 2, math.pi)) < 0.05:
            continue
        ca = amplitudes(theta, Modulation.tan())
        scale = max(abs(v) for v in ca.numerator_in.values())
        assert abs(ca.numerator_in[(1, "-")]) <= 1e-14 * scale


def test_negcot_blocks_unwanted_target():
    for theta in np.linspace(0.1, 2 * math.pi - 0.1, 25):
        if abs(math.remainder(theta, math.pi)) < 0.05:
            continue
        ca = amplitudes(theta, Modulation.negcot())
        scale = max(abs(v) for v in ca.numerator_in.values())
        assert abs(ca.numerator_in[(1, "+")]) <= 1e-14 * scale


def test_negcot_quarter_pi_amplitude():
    p = params(math.pi / 4, Modulation.negcot())
    ca = amplitudes(math.pi / 4, Modulation.negcot())
    # f = -1 there, so the surviving coefficient is f cos - sin = -sqrt(2),
    # i.e. exactly -1/sin(pi/4), scaled by the channel strength 2 g Omega sqrt(kappa)
    expected = 2 * p.g * p.Omega * math.sqrt(p.kappa) * (-math.sqrt(2))
    assert ca.numerator_in[(1, "-")] == pytest.approx(expected, rel=1e-10)


def test_favoured_amplitude_tracks_trig_reference():
    strength = None
    for theta in np.linspace(0.2, 2 * math.pi - 0.2, 30):
        if abs(math.remainder(theta - math.pi / 2, math.pi)) < 0.1:
            continue
        p = params(theta, Modulation.tan())
        ca = amplitudes(theta, Modulation.tan())
        ratio = ca.numerator_in[(1, "+")] * math.cos(theta)
        strength = strength if strength is not None else ratio
        assert ratio == pytest.approx(strength, rel=1e-10)
    assert strength == pytest.approx(2 * p.g * p.Omega * math.sqrt(p.kappa),
                                     rel=1e-10)


def test_no_escape_from_double_flip():
    for modulation in (Modulation.tan(), Modulation.negcot()):
        ca = amplitudes(1.1, modulation)
        assert all(v == 0 for v in ca.out_of_11.values())


def test_all_channels_present():
    ca = amplitudes(2.0, Modulation.tan())
    assert {j for j, _ in ca.numerator_in} == set(range(1, 7))
    # jump channels exclude the diagonal, the Hamiltonian keeps it
    assert (1, "+", "+") not in ca.numerator_out
    assert (6, "+", "+") in ca.numerator_out


# ---------------------------------------------------------------- regime

def test_regime_strong_at_optima():
    assert protocol.regime_classifier(
        params(math.pi, Modulation.tan())).classification == "strong"
    assert protocol.regime_classifier(
        params(math.pi / 2, Modulation.negcot())).classification == "strong"


def test_regime_invalid_at_quarter_turns():
    for theta in (math.pi / 2, 3 * math.pi / 2):
        p = model.SystemParameters(g=1, delta=0.5, Delta=2, kappa=0.1,
                                   gamma=0.05, Omega=0.01, theta=theta,
                                   modulation=Modulation.tan())
        report = protocol.regime_classifier(p)
        assert report.classification == "invalid"
        assert not math.isfinite(report.f_magnitude)


def test_regime_periodic():
    for theta in np.linspace(0.11, math.pi - 0.11, 17):
        a = protocol.regime_classifier(params(theta, Modulation.tan()))
        b = protocol.regime_classifier(params(theta + math.pi, Modulation.tan()))
        assert a.classification == b.classification


def test_regime_rejects_fixed():
    with pytest.raises(ValueError):
        protocol.regime_classifier(params(1.0, Modulation.fixed(0.5)))


# ---------------------------------------------------------------- detuning

def test_engineer_detunings_inverts_delta():
    scaled = ScaledParameters(tilde_delta=0.5, tilde_Delta=7.0)
    engineered = protocol.engineer_detunings(scaled)
    assert engineered.tilde_Delta == pytest.approx(2.0)


def test_engineer_detunings_idempotent():
    scaled = protocol.engineer_detunings(ScaledParameters(tilde_delta=0.8))
    again = protocol.engineer_detunings(scaled)
    assert scaled == again


def test_detuning_report_caption_values():
    report = protocol.detuning_report(ScaledParameters())
    assert report["detuning_product"] == pytest.approx(1.0)
    assert report["d_tilde_1_leading"] == pytest.approx(0.0, abs=1e-15)
    assert report["d_tilde_2_leading"] == pytest.approx(4.0)
    assert report["residual"] == pytest.approx(0.005 + 0.45j, abs=1e-15)
    # the exact values must agree with the defining formula
    p = model.from_scaled(ScaledParameters(), math.pi, Modulation.tan())
    sc = effective.propagator_scalars(p)
    assert report["d_tilde_1_exact"] == pytest.approx(sc.d_tilde[1], rel=1e-12)
    assert report["d_tilde_2_exact"] == pytest.approx(sc.d_tilde[2], rel=1e-12)


# ---------------------------------------------------------- cooperativity

def test_cooperativity_caption():
    assert protocol.cooperativity(params(1.0, Modulation.tan())) == pytest.approx(200.0)


def test_cooperativity_quadratic_in_g():
    p = params(1.0, Modulation.tan())
    doubled = model.SystemParameters(g=2 * p.g, delta=p.delta, Delta=p.Delta,
                                     kappa=p.kappa, gamma=p.gamma, Omega=p.Omega,
                                     theta=p.theta, modulation=p.modulation)
    assert protocol.cooperativity(doubled) == pytest.approx(
        4 * protocol.cooperativity(p))


def test_cooperativity_kappa_tilde_two():
    scaled = ScaledParameters(tilde_kappa=2.0, tilde_gamma=0.5)
    p = model.from_scaled(scaled, 1.0, Modulation.tan())
    assert protocol.cooperativity(p) == pytest.approx(100.0)


def test_cooperativity_lossless_rejected():
    p = model.SystemParameters(g=1, delta=0, Delta=1, kappa=0.0, gamma=0.1,
                               Omega=0.01, theta=1.0, modulation=Modulation.tan())
    with pytest.raises(ValueError):
        protocol.cooperativity(p)


# ------------------------------------------------------------- overlays

def test_reference_trig_tables():
    g, h, j = protocol.reference_trig(Modulation.tan(), math.pi / 4)
    assert g == pytest.approx(math.sqrt(2) / 5)
    assert h == pytest.approx(math.sin(math.pi / 4) / 5)
    assert j == pytest.approx(1.0 / 5)
    g, h, j = protocol.reference_trig(Modulation.negcot(), math.pi / 4)
    assert g == pytest.approx(math.sqrt(2) / 5)
    assert j == pytest.approx(1.0 / 5)
    assert all(math.isnan(v) for v in
               protocol.reference_trig(Modulation.fixed(1.0), 0.3))
