"""Adiabatic elimination of the excited manifold.

The eight excited basis-B states (four single-atomic-excitation, four
single-photon) evolve under the non-Hermitian Hamiltonian

    H_NH = H_e - (i/2) sum_k L_k^dag L_k,

whose inverse is the matrix of propagators between excited states.
Because every coupling is real in basis B, H_NH is complex symmetric
and its inverse satisfies C = B^T in the 2x2-block partition
[atomic | photonic].  The reduced ground-space model is

    H_eff = -1/2 W_- (H_NH^-1 + (H_NH^-1)^dag) W_+
    L_eff_k = L_k H_NH^-1 W_+ .

Three independent routes to the same objects are kept side by side and
cross-validated at 1e-10 or better: direct LU inversion, the
Schur-complement (Banachiewicz) block inversion, and closed-form
trigonometric expressions in the propagator scalars

    d_n = (Delta - i gamma/2)(delta - i kappa/2) - n g^2,
    d~_n = 4 n g^2 + (gamma + 2i Delta)(kappa + 2i delta) = -4 d_n,
    R_n = (Delta - i gamma/2) / d_n.

H_eff is only produced numerically; its closed coefficients have no
usable printed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg, model
from .exceptions import DegeneratePropagatorError, SingularBlockError, SingularMatrixError
from .model import (
    A0M, A0P, A1M, A1P, C00, C11, CM, CP,
    G00, G11, GMINUS, GPLUS, GROUND_DIM, GROUND_LABELS,
    SystemParameters,
)

__all__ = [
    "PropagatorScalars",
    "PropagatorBlocks",
    "EffectiveModel",
    "EXCITED_DIM",
    "EXCITED_LABELS",
    "build_H_NH",
    "banachiewicz_invert",
    "propagator_scalars",
    "closed_form_blocks",
    "derive_effective_model",
    "closed_form_effective",
]

EXCITED_DIM = 8
# atomic-excitation block first, photonic block second
EXCITED_LABELS = model.BASIS_LABELS[GROUND_DIM:]
_EXCITED = slice(GROUND_DIM, model.BASIS_DIM)
_GROUND = slice(0, GROUND_DIM)


@dataclass(frozen=True)
class PropagatorScalars:
    """d_n, d~_n and R_n for n in {0, 1, 2}."""

    d: dict[int, complex]
    d_tilde: dict[int, complex]
    R: dict[int, complex]


def propagator_scalars(params: SystemParameters) -> PropagatorScalars:
    """Evaluate the propagator denominators; -4 d_n = d~_n by identity."""
    dg = params.Delta - 0.5j * params.gamma
    dk = params.delta - 0.5j * params.kappa
    g2 = params.g ** 2
    d, d_tilde, R = {}, {}, {}
    for n in (0, 1, 2):
        d[n] = dg * dk - n * g2
        d_tilde[n] = 4 * n * g2 + (params.gamma + 2j * params.Delta) * (
            params.kappa + 2j * params.delta
        )
        if abs(d[n]) < 1e-12 * g2:
            raise DegeneratePropagatorError(f"|d_{n}| = {abs(d[n]):.3e} is degenerate")
        R[n] = dg / d[n]
    return PropagatorScalars(d=d, d_tilde=d_tilde, R=R)


def build_H_NH(params: SystemParameters) -> np.ndarray:
    """Non-Hermitian Hamiltonian on the 8 excited basis-B states.

    Restriction of H_e - (i/2) sum L^dag L, ordered
    [psi0+, psi0-, psi1+, psi1-, 00c, psic+, psic-, 11c].
    """
    ops = model.appendix_operators(params)
    decay = sum(Lk.conj().T @ Lk for Lk in ops.L)
    full = ops.H_e - 0.5j * decay
    return np.ascontiguousarray(full[_EXCITED, _EXCITED])


@dataclass(eq=False)
class PropagatorBlocks:
    """The four 4x4 blocks of H_NH^-1 in the [atomic | photonic] partition."""

    A_hat: np.ndarray
    B_hat: np.ndarray
    C_hat: np.ndarray
    D_hat: np.ndarray

    def assembled(self) -> np.ndarray:
        top = np.hstack([self.A_hat, self.B_hat])
        bottom = np.hstack([self.C_hat, self.D_hat])
        return np.vstack([top, bottom])


def banachiewicz_invert(h_nh: np.ndarray) -> PropagatorBlocks:
    """Invert the partitioned 8x8 H_NH by Schur complement.

    With H_NH = [[At, Bt], [Ct, Dt]] and S = Dt - Ct At^-1 Bt:

        D = S^-1,  B = -At^-1 Bt S^-1,  C = -S^-1 Ct At^-1,
        A = At^-1 + At^-1 Bt S^-1 Ct At^-1 .
    """
    h = linalg.as_square(h_nh)
    if h.shape[0] != EXCITED_DIM:
        raise SingularBlockError("shape", f"expected 8x8, got {h.shape}")
    n = EXCITED_DIM // 2
    At, Bt = h[:n, :n], h[:n, n:]
    Ct, Dt = h[n:, :n], h[n:, n:]
    try:
        At_inv = linalg.invert(At)
    except SingularMatrixError as exc:
        raise SingularBlockError("leading (atomic-excitation) block") from exc
    schur = Dt - Ct @ At_inv @ Bt
    try:
        D_hat = linalg.invert(schur)
    except SingularMatrixError as exc:
        raise SingularBlockError("Schur complement (photonic block)") from exc
    B_hat = -At_inv @ Bt @ D_hat
    C_hat = -D_hat @ Ct @ At_inv
    A_hat = At_inv + At_inv @ Bt @ D_hat @ Ct @ At_inv
    return PropagatorBlocks(A_hat=A_hat, B_hat=B_hat, C_hat=C_hat, D_hat=D_hat)


def closed_form_blocks(params: SystemParameters) -> PropagatorBlocks:
    """Blocks of H_NH^-1 from their closed trigonometric expressions.

    Local indices: atomic block (psi0+, psi0-, psi1+, psi1-), photonic
    block (00c, psic+, psic-, 11c).
    """
    sc = propagator_scalars(params)
    d1, d2 = sc.d[1], sc.d[2]
    g = params.g
    c, s = math.cos(params.theta), math.sin(params.theta)
    dg = params.Delta - 0.5j * params.gamma
    dk = params.delta - 0.5j * params.kappa

    A_hat = np.zeros((4, 4), dtype=np.complex128)
    A_hat[0, 0] = A_hat[1, 1] = dk / d1
    A_hat[2, 2] = (d2 + g * g * (1 + math.sin(2 * params.theta))) / (d2 * dg)
    A_hat[3, 3] = (d2 + g * g * (1 - math.sin(2 * params.theta))) / (d2 * dg)
    A_hat[2, 3] = A_hat[3, 2] = g * g * math.cos(2 * params.theta) / (d2 * dg)

    B_hat = np.zeros((4, 4), dtype=np.complex128)
    B_hat[0, 1] = -g / d1          # psi0+ <- psic+
    B_hat[1, 2] = -g / d1          # psi0- <- psic-
    B_hat[2, 3] = -g * (c + s) / d2  # psi1+ <- 11c
    B_hat[3, 3] = -g * (c - s) / d2  # psi1- <- 11c

    D_hat = np.diag([sc.R[0], sc.R[1], sc.R[1], sc.R[2]]).astype(np.complex128)
    return PropagatorBlocks(A_hat=A_hat, B_hat=B_hat,
                            C_hat=B_hat.T.copy(), D_hat=D_hat)


@dataclass(eq=False)
class EffectiveModel:
    """Reduced 4x4 model on the ground states [00, psi+, psi-, 11]."""

    H_eff: np.ndarray
    L_eff: list[np.ndarray]
    scalars: PropagatorScalars
    params: SystemParameters

    labels = GROUND_LABELS


def derive_effective_model(params: SystemParameters) -> EffectiveModel:
    """Effective operators from the numerically inverted H_NH.

    This route never touches the closed-form expressions, so it serves
    as the oracle for `closed_form_effective` and `closed_form_blocks`.
    """
    ops = model.appendix_operators(params)
    h_inv = linalg.invert(build_H_NH(params))
    W_up = ops.W_plus[_EXCITED, _GROUND]          # 8 x 4
    W_down = W_up.conj().T
    H_eff = -0.5 * W_down @ (h_inv + h_inv.conj().T) @ W_up
    L_eff = [Lk[_GROUND, _EXCITED] @ h_inv @ W_up for Lk in ops.L]
    return EffectiveModel(H_eff=H_eff, L_eff=L_eff,
                          scalars=propagator_scalars(params), params=params)


def closed_form_effective(params: SystemParameters) -> list[np.ndarray]:
    """The five effective jump operators from closed coefficients.

    In-amplitudes (|00> -> |psi+->) carry 1/d~_1; out-amplitudes
    (|psi+-> -> anything) carry 1/d~_2.  No operator has a |11> column:
    the doubly flipped state is never re-excited.
    """
    f = params.f()
    sc = propagator_scalars(params)
    td1, td2 = sc.d_tilde[1], sc.d_tilde[2]
    g, delta, Delta = params.g, params.delta, params.Delta
    kappa, gamma, Omega = params.kappa, params.gamma, params.Omega
    c, s = math.cos(params.theta), math.sin(params.theta)
    g2 = g * g

    def zeros():
        return np.zeros((GROUND_DIM, GROUND_DIM), dtype=np.complex128)

    # cavity-loss channel
    P1 = 2 * g * Omega * math.sqrt(kappa)
    L1 = zeros()
    L1[GPLUS, G00] = P1 * (c + f * s) / td1
    L1[GMINUS, G00] = P1 * (f * c - s) / td1
    L1[G11, GMINUS] = P1 * (c - f * s) / td2
    L1[G11, GPLUS] = P1 * (f * c + s) / td2

    # spontaneous-emission channels; rate is the per-channel split
    def q_in(rate):
        return 1j * math.sqrt(rate) * Omega * (2j * delta + kappa) / td1

    def q_out(rate):
        return 1j * math.sqrt(rate) * Omega / ((gamma + 2j * Delta) * td2)

    E_minus = td1 * c + 4 * g2 * f * s
    E_plus = td1 * s - 4 * g2 * f * c
    F_minus = td1 * f * s + 4 * g2 * c
    F_plus = td1 * f * c - 4 * g2 * s

    q0, G0 = q_in(params.gamma_to_0), q_out(params.gamma_to_0)
    q1, G1 = q_in(params.gamma_to_1), q_out(params.gamma_to_1)

    L2 = zeros()
    L2[G00, G00] = q0
    L2[GMINUS, GMINUS] = G0 * c * E_minus
    L2[GPLUS, GMINUS] = G0 * s * E_minus
    L2[GPLUS, GPLUS] = G0 * s * E_plus
    L2[GMINUS, GPLUS] = G0 * c * E_plus

    L3 = zeros()
    L3[G00, G00] = q0 * f
    L3[GMINUS, GMINUS] = G0 * s * F_minus
    L3[GPLUS, GMINUS] = -G0 * c * F_minus
    L3[GPLUS, GPLUS] = G0 * c * F_plus
    L3[GMINUS, GPLUS] = -G0 * s * F_plus

    L4 = zeros()
    L4[GMINUS, G00] = -q1 * s
    L4[GPLUS, G00] = q1 * c
    L4[G11, GMINUS] = G1 * E_minus
    L4[G11, GPLUS] = G1 * E_plus

    L5 = zeros()
    L5[GMINUS, G00] = q1 * f * c
    L5[GPLUS, G00] = q1 * f * s
    L5[G11, GMINUS] = -G1 * F_minus
    L5[G11, GPLUS] = G1 * F_plus

    return [L1, L2, L3, L4, L5]
