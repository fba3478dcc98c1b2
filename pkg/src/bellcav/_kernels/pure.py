"""Pure-numpy fallback for the time-stepping kernels.

Semantics must match bellcav._kernels._stepping exactly: the state
buffer is advanced in place and snapshots are written at the 1-based
step indices listed in snap_steps (strictly increasing, last entry is
the total step count).
"""

from __future__ import annotations

import numpy as np


def propagate_steps(P: np.ndarray, v: np.ndarray,
                    snap_steps: np.ndarray, out: np.ndarray) -> None:
    """Iterate v <- P @ v, snapshotting into out[i] at step snap_steps[i]."""
    tmp = np.empty_like(v)
    i = 0
    n_steps = int(snap_steps[-1]) if len(snap_steps) else 0
    for k in range(1, n_steps + 1):
        np.dot(P, v, out=tmp)
        v[:] = tmp
        if i < len(snap_steps) and k == snap_steps[i]:
            out[i] = v
            i += 1


def _lindblad_rhs(K: np.ndarray, Kd: np.ndarray,
                  Ls: np.ndarray, Lds: np.ndarray,
                  rho: np.ndarray) -> np.ndarray:
    # K = -iH - (1/2) sum L^dag L, so rhs = K rho + rho K^dag + sum L rho L^dag
    out = K @ rho + rho @ Kd
    for L, Ld in zip(Ls, Lds):
        out += L @ rho @ Ld
    return out


def rk4_steps(K: np.ndarray, Kd: np.ndarray,
              Ls: np.ndarray, Lds: np.ndarray,
              rho: np.ndarray, dt: float,
              snap_steps: np.ndarray, out: np.ndarray) -> None:
    """Classic fixed-step RK4 on the matrix-valued master equation."""
    i = 0
    n_steps = int(snap_steps[-1]) if len(snap_steps) else 0
    for k in range(1, n_steps + 1):
        k1 = _lindblad_rhs(K, Kd, Ls, Lds, rho)
        k2 = _lindblad_rhs(K, Kd, Ls, Lds, rho + (0.5 * dt) * k1)
        k3 = _lindblad_rhs(K, Kd, Ls, Lds, rho + (0.5 * dt) * k2)
        k4 = _lindblad_rhs(K, Kd, Ls, Lds, rho + dt * k3)
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if i < len(snap_steps) and k == snap_steps[i]:
            out[i] = rho
            i += 1
