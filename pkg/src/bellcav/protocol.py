"""Channel decomposition and parameter-engineering rules.

Every effective matrix element into a target state carries 1/d~_1 and
every element out of a target carries 1/d~_2, so the protocol works by
making |d~_1| << |d~_2| (detuning choice tilde_delta * tilde_Delta = 1)
and then choosing the driving modulation so the wanted in-amplitude
survives while the unwanted one cancels:

    f = tan(theta)   -> in-amplitude to |psi+> ~ sec(theta), |psi-> gets 0
    f = -cot(theta)  -> in-amplitude to |psi-> ~ -cosec(theta), |psi+> gets 0

The remaining theta dependence of the competing out-amplitudes decides
how strongly the balance condition holds, which is what the regime
classifier grades.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .effective import EffectiveModel
from .exceptions import PoleError
from .model import (
    G00, G11, GMINUS, GPLUS,
    Modulation, ScaledParameters, SystemParameters, f_value,
)

__all__ = [
    "ChannelAmplitudes",
    "RegimeReport",
    "channel_amplitudes",
    "regime_classifier",
    "engineer_detunings",
    "detuning_report",
    "cooperativity",
    "reference_trig",
]

_TARGETS = {"+": GPLUS, "-": GMINUS}
_FINALS = {"+": GPLUS, "-": GMINUS, "11": G11}


@dataclass(frozen=True)
class ChannelAmplitudes:
    """Scaled matrix elements of the six effective channels.

    Channels 1..5 are the effective jump operators, channel 6 the
    effective Hamiltonian.  numerator_in[(j, target)] is
    <target| O_j |00> * d~_1; numerator_out[(j, source, final)] is
    <final| O_j |source> * d~_2 with the diagonal (source == final)
    excluded for the jump channels, where it is a rate, not a
    transition.  out_of_11 collects <final| O_j |11> * d~_2, which the
    protocol guarantees to vanish identically.
    """

    numerator_in: dict[tuple[int, str], complex]
    numerator_out: dict[tuple[int, str, str], complex]
    out_of_11: dict[tuple[int, str], complex]


def channel_amplitudes(m: EffectiveModel) -> ChannelAmplitudes:
    ops = {j + 1: L for j, L in enumerate(m.L_eff)}
    ops[6] = m.H_eff
    td1, td2 = m.scalars.d_tilde[1], m.scalars.d_tilde[2]

    num_in, num_out, from_11 = {}, {}, {}
    for j, op in ops.items():
        for target, row in _TARGETS.items():
            num_in[(j, target)] = complex(op[row, G00] * td1)
        for source, col in _TARGETS.items():
            for final, row in _FINALS.items():
                if j <= 5 and final == source:
                    continue
                num_out[(j, source, final)] = complex(op[row, col] * td2)
        for final, row in _FINALS.items():
            from_11[(j, final)] = complex(op[row, G11] * td2)
    return ChannelAmplitudes(numerator_in=num_in, numerator_out=num_out,
                             out_of_11=from_11)


@dataclass(frozen=True)
class RegimeReport:
    """How well the in-over-out dominance holds at one angle."""

    theta: float
    modulation: Modulation
    classification: str            # "strong", "weak" or "invalid"
    dominant_in_amplitude: complex
    competitor_max: float
    f_magnitude: float


def regime_classifier(params: SystemParameters, ratio_strong: float = 2.0,
                      f_max: float = 2.0) -> RegimeReport:
    """Grade the angle by the trigonometric dominance inequalities.

    tan:    |sec t| against |sin t tan t| and |sin t|
    negcot: |cosec t| against |cos t cot t| and |cos t|

    "strong" needs the dominant term to beat both competitors by
    ratio_strong, "weak" to merely beat them; angles with |f| > f_max
    (individual addressing no longer perturbative) are "invalid", and
    exact poles are reported as invalid rather than raised.
    """
    if params.modulation.kind not in ("tan", "negcot"):
        raise ValueError("regime classification needs tan or negcot modulation")
    theta = params.theta
    c, s = math.cos(theta), math.sin(theta)
    try:
        f = f_value(params.modulation, theta)
        f_mag = abs(f)
    except PoleError:
        f_mag = math.inf
    if params.modulation.kind == "tan":
        dominant = complex(1.0 / c) if c != 0 else complex(math.inf)   # sec
        competitors = (abs(s * s / c) if c != 0 else math.inf, abs(s))
    else:
        dominant = complex(-1.0 / s) if s != 0 else complex(math.inf)
        competitors = (abs(c * c / s) if s != 0 else math.inf, abs(c))
    comp_max = max(competitors)

    if not math.isfinite(f_mag) or f_mag > f_max:
        label = "invalid"
    elif abs(dominant) >= ratio_strong * comp_max:
        label = "strong"
    elif abs(dominant) > comp_max:
        label = "weak"
    else:
        label = "invalid"
    return RegimeReport(theta=theta, modulation=params.modulation,
                        classification=label, dominant_in_amplitude=dominant,
                        competitor_max=comp_max, f_magnitude=f_mag)


def engineer_detunings(scaled: ScaledParameters) -> ScaledParameters:
    """Choose the atomic detuning so tilde_delta * tilde_Delta = 1.

    This cancels the leading 4 alpha^2 x^2 (1 - dd) term of d~_1 while
    leaving d~_2 ~ 4 alpha^2 x^2, which is the whole suppression
    mechanism.  Idempotent.
    """
    if scaled.tilde_delta <= 0:
        raise ValueError("tilde_delta must be positive to engineer detunings")
    return replace(scaled, tilde_Delta=1.0 / scaled.tilde_delta)


def detuning_report(scaled: ScaledParameters) -> dict:
    """Exact vs leading-order d~_j for j in {1, 2}.

    Leading order keeps only 4 x^2 alpha^2 (j - tilde_delta*tilde_Delta);
    the j-independent residual 2i alpha x^2 (dg + Dk) + x^2 gk is
    reported separately because it is what keeps the exact d~_1 away
    from zero even at tilde_delta*tilde_Delta = 1.
    """
    a, x = scaled.alpha, scaled.x
    dd = scaled.tilde_delta * scaled.tilde_Delta
    residual = x * x * (
        2j * a * (scaled.tilde_delta * scaled.tilde_gamma
                  + scaled.tilde_Delta * scaled.tilde_kappa)
        + scaled.tilde_gamma * scaled.tilde_kappa
    )
    out = {"residual": residual, "detuning_product": dd}
    for j in (1, 2):
        leading = 4 * x * x * a * a * (j - dd)
        out[f"d_tilde_{j}_leading"] = leading
        out[f"d_tilde_{j}_exact"] = leading + residual
    return out


def cooperativity(params: SystemParameters) -> float:
    """C = g^2 / (kappa * gamma), the cavity figure of merit."""
    if params.kappa <= 0 or params.gamma <= 0:
        raise ValueError("cooperativity is undefined for a lossless system")
    return params.g ** 2 / (params.kappa * params.gamma)


def reference_trig(modulation: Modulation, theta: float) -> tuple[float, float, float]:
    """Overlay curves (scaled by 1/5) that track the sweep's shape.

    tan:    |sec|/5, |sin|/5, |tan|/5
    negcot: |cosec|/5, |cos|/5, |cot|/5
    Fixed modulation has no table; returns NaNs.
    """
    c, s = math.cos(theta), math.sin(theta)
    if modulation.kind == "tan":
        sec = abs(1.0 / c) if c != 0 else math.inf
        t = abs(s / c) if c != 0 else math.inf
        return (sec / 5, abs(s) / 5, t / 5)
    if modulation.kind == "negcot":
        cosec = abs(1.0 / s) if s != 0 else math.inf
        cot = abs(c / s) if s != 0 else math.inf
        return (cosec / 5, abs(c) / 5, cot / 5)
    return (math.nan, math.nan, math.nan)
