"""Lindblad master-equation engine for the full and reduced models.

Two integration routes:

* RK4: classic fixed-step fourth order on the matrix-valued equation
  drho/dt = -i[H, rho] + sum_k (L rho L^dag - 1/2 {L^dag L, rho}).
* PropagatorExp: vectorise the generator once into the d^2 x d^2
  Liouvillian (column-stacking convention), exponentiate a single step
  P = e^(L dt), and iterate rho <- P rho.  Exact for time-independent
  generators regardless of dt, so it is the default for long horizons.

Positivity and trace are monitored, never enforced: a drifting trace
aborts the run instead of being renormalised away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg, model
from ._kernels import propagate_steps, rk4_steps
from .exceptions import (
    DimensionMismatchError,
    IntegrationUnstableError,
    NoStationaryStateError,
)

__all__ = [
    "GroundPopulations",
    "IntegratorConfig",
    "Trajectory",
    "lindblad_rhs",
    "liouvillian_matrix",
    "ground_populations",
    "evolve",
    "steady_state",
    "density_diagnostics",
]

TRACE_INSTABILITY_GATE = 1e-6


@dataclass(frozen=True)
class GroundPopulations:
    """Populations of the four theta-adapted ground states."""

    p00: float
    p_plus: float
    p_minus: float
    p11: float
    leakage: float | None = None   # full model only: weight outside the
                                   # single-excitation subspace


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration plan; times in units of 1/g."""

    method: str = "prop"           # "prop" or "rk4"
    dt: float = 1.0
    t_final: float = 15000.0
    output_stride: int = 1

    def __post_init__(self):
        if self.method not in ("prop", "rk4"):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_final < self.dt:
            raise ValueError("t_final must be at least one step")
        if self.output_stride < 1:
            raise ValueError("output_stride must be a positive integer")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass(eq=False)
class Trajectory:
    """Sampled states, ground populations and integrator diagnostics."""

    times: np.ndarray
    states: np.ndarray             # (n_samples, dim, dim)
    p00: np.ndarray | None
    p_plus: np.ndarray | None
    p_minus: np.ndarray | None
    p11: np.ndarray | None
    trace_dev: np.ndarray
    herm_dev: np.ndarray
    min_eig: np.ndarray
    leakage: np.ndarray | None
    method: str
    dt: float
    theta: float | None


def lindblad_rhs(H: np.ndarray, Ls: list[np.ndarray], rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the master equation; traceless by construction."""
    H = linalg.as_square(H, "H")
    rho = linalg.as_square(rho, "rho")
    if H.shape != rho.shape:
        raise DimensionMismatchError(f"H is {H.shape}, rho is {rho.shape}")
    out = -1j * (H @ rho - rho @ H)
    for L in Ls:
        L = linalg.as_square(L, "L")
        if L.shape != rho.shape:
            raise DimensionMismatchError(f"L is {L.shape}, rho is {rho.shape}")
        LdL = L.conj().T @ L
        out += L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def liouvillian_matrix(H: np.ndarray, Ls: list[np.ndarray]) -> np.ndarray:
    """Column-stacking superoperator: d(vec rho)/dt = L vec(rho).

    L = -i(I x H - H^T x I)
        + sum_k [ conj(L) x L - 1/2 I x (L^dag L) - 1/2 (L^dag L)^T x I ].
    """
    H = linalg.as_square(H, "H")
    d = H.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    kron = linalg.tensor_product
    out = -1j * (kron(eye, H) - kron(H.T, eye))
    for L in Ls:
        L = linalg.as_square(L, "L")
        if L.shape[0] != d:
            raise DimensionMismatchError(f"L is {L.shape}, H is {H.shape}")
        LdL = L.conj().T @ L
        out += kron(L.conj(), L) - 0.5 * kron(eye, LdL) - 0.5 * kron(LdL.T, eye)
    return out


def _vec(rho: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(rho.reshape(-1, order="F"))


def _unvec(v: np.ndarray, d: int) -> np.ndarray:
    return v.reshape((d, d), order="F")


def ground_populations(rho: np.ndarray, theta: float | None = None) -> GroundPopulations:
    """Populations of [|00>, |psi+>, |psi->, |11>] for a 4- or 18-dim state."""
    rho = linalg.as_square(rho, "rho")
    d = rho.shape[0]
    if d == model.GROUND_DIM:
        diag = rho.diagonal().real
        return GroundPopulations(*(float(x) for x in diag))
    if d == model.FULL_DIM:
        if theta is None:
            raise ValueError("theta is required for full-space populations")
        V = model.build_basis_B(theta).isometry
        reduced = V.conj().T @ rho @ V
        diag = reduced.diagonal().real
        leakage = float(rho.trace().real - diag.sum())
        return GroundPopulations(*(float(diag[i]) for i in range(4)), leakage=leakage)
    raise DimensionMismatchError(f"populations need dim 4 or 18, got {d}")


def density_diagnostics(rho: np.ndarray) -> tuple[float, float, float]:
    """(trace deviation, Hermiticity deviation, smallest eigenvalue)."""
    if not np.all(np.isfinite(rho.view(np.float64))):
        return math.inf, math.inf, math.nan
    trace_dev = abs(rho.trace() - 1.0)
    herm_dev = linalg.frobenius(rho - rho.conj().T)
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    return float(trace_dev), float(herm_dev), min_eig


def evolve(H: np.ndarray, Ls: list[np.ndarray], rho0: np.ndarray,
           config: IntegratorConfig, theta: float | None = None) -> Trajectory:
    """Integrate the master equation and sample every output_stride steps.

    The final step is always sampled.  Population records are produced
    for 4- and 18-dim states; other dimensions (test systems) get
    diagnostics only.
    """
    H = linalg.as_square(H, "H")
    rho0 = linalg.as_square(rho0, "rho0")
    if H.shape != rho0.shape:
        raise DimensionMismatchError(f"H is {H.shape}, rho0 is {rho0.shape}")
    d = H.shape[0]
    Ls = [linalg.as_square(L, "L") for L in Ls]

    n_steps = config.n_steps
    snaps = list(range(config.output_stride, n_steps + 1, config.output_stride))
    if not snaps or snaps[-1] != n_steps:
        snaps.append(n_steps)
    snap_steps = np.asarray(snaps, dtype=np.int64)

    if config.method == "prop":
        superop = liouvillian_matrix(H, Ls)
        propagator = linalg.matrix_exponential(superop * config.dt)
        v = _vec(rho0.copy())
        flat_out = np.empty((len(snaps), d * d), dtype=np.complex128)
        propagate_steps(propagator, v, snap_steps, flat_out)
        sampled = [_unvec(row, d) for row in flat_out]
    else:
        K = -1j * H - 0.5 * sum(
            (L.conj().T @ L for L in Ls),
            start=np.zeros((d, d), dtype=np.complex128),
        )
        Ls_arr = (np.ascontiguousarray(np.stack(Ls)) if Ls
                  else np.zeros((0, d, d), dtype=np.complex128))
        Lds_arr = np.ascontiguousarray(Ls_arr.conj().transpose(0, 2, 1))
        rho = np.ascontiguousarray(rho0.copy())
        out = np.empty((len(snaps), d, d), dtype=np.complex128)
        rk4_steps(np.ascontiguousarray(K), np.ascontiguousarray(K.conj().T),
                  Ls_arr, Lds_arr, rho, config.dt, snap_steps, out)
        sampled = list(out)

    states = np.stack([rho0] + sampled)
    times = np.concatenate([[0.0], snap_steps * config.dt])

    n = states.shape[0]
    trace_dev = np.empty(n)
    herm_dev = np.empty(n)
    min_eig = np.empty(n)
    for i, rho_i in enumerate(states):
        trace_dev[i], herm_dev[i], min_eig[i] = density_diagnostics(rho_i)
    worst = int(np.argmax(trace_dev))
    # negated comparison so NaN/inf (overflowed entries) also trip the gate
    if not trace_dev[worst] <= TRACE_INSTABILITY_GATE:
        raise IntegrationUnstableError(
            f"trace deviation {trace_dev[worst]:.3e} at t={times[worst]:g} "
            f"(method={config.method}, dt={config.dt}); reduce dt"
        )

    pops = leakage = None
    if d in (model.GROUND_DIM, model.FULL_DIM):
        records = [ground_populations(rho_i, theta) for rho_i in states]
        pops = {
            "p00": np.array([r.p00 for r in records]),
            "p_plus": np.array([r.p_plus for r in records]),
            "p_minus": np.array([r.p_minus for r in records]),
            "p11": np.array([r.p11 for r in records]),
        }
        if d == model.FULL_DIM:
            leakage = np.array([r.leakage for r in records])

    return Trajectory(
        times=times, states=states,
        p00=pops["p00"] if pops else None,
        p_plus=pops["p_plus"] if pops else None,
        p_minus=pops["p_minus"] if pops else None,
        p11=pops["p11"] if pops else None,
        trace_dev=trace_dev, herm_dev=herm_dev, min_eig=min_eig,
        leakage=leakage, method=config.method, dt=config.dt, theta=theta,
    )


def steady_state(H: np.ndarray, Ls: list[np.ndarray],
                 rel_tol: float = 1e-10) -> list[np.ndarray]:
    """Orthonormal basis of the Liouvillian nullspace via dense SVD.

    Each null vector is Hermitised and, when its trace allows, scaled
    to a trace-one (and, if positive, physical) representative.  Cheap
    for the reduced model; the 324x324 full case works but is slow.
    """
    superop = liouvillian_matrix(H, Ls)
    d = H.shape[0]
    _, svals, vh = np.linalg.svd(superop)
    keep = svals <= rel_tol * svals[0]
    if not keep.any():
        raise NoStationaryStateError(
            f"no singular value below {rel_tol:.1e} * sigma_max"
        )
    reps = []
    for row in vh[keep]:
        X = _unvec(row.conj(), d)
        herm = 0.5 * (X + X.conj().T)
        if linalg.frobenius(herm) < 1e-12 * linalg.frobenius(X):
            herm = (X - X.conj().T) / 2j   # purely anti-Hermitian null vector
        tr = herm.trace()
        if abs(tr) > 1e-10 * linalg.frobenius(herm):
            herm = herm / tr.real
        else:
            herm = herm / linalg.frobenius(herm)
        reps.append(herm)
    return reps
