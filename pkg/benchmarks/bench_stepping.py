"""Benchmark the compiled stepping kernels against the pure-numpy fallback.

Run from the repository root:

    python benchmarks/bench_stepping.py

The cases mirror real workloads: the reduced model's 16x16 propagator
over a long horizon (the sweep workhorse), the full model's 324x324
propagator, and RK4 on both state dimensions.
"""

from __future__ import annotations

import time

import numpy as np

from bellcav import dynamics, effective, model, validate
from bellcav._kernels import pure

try:
    from bellcav._kernels import _stepping as compiled
except ImportError:
    compiled = None


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def propagate_case(dim_label: str, superop: np.ndarray, v0: np.ndarray,
                   n_steps: int):
    snap = np.array([n_steps], dtype=np.int64)
    propagator = np.ascontiguousarray(
        dynamics.linalg.matrix_exponential(superop))
    out = np.empty((1, v0.size), dtype=np.complex128)

    def run(backend):
        v = np.ascontiguousarray(v0.copy())
        backend.propagate_steps(propagator, v, snap, out)

    return _report(f"propagate {dim_label} x {n_steps} steps", run)


def rk4_case(dim_label: str, H: np.ndarray, Ls: list[np.ndarray],
             rho0: np.ndarray, n_steps: int, dt: float):
    d = H.shape[0]
    K = np.ascontiguousarray(-1j * H - 0.5 * sum(L.conj().T @ L for L in Ls))
    Ls_arr = np.ascontiguousarray(np.stack(Ls))
    Lds = np.ascontiguousarray(Ls_arr.conj().transpose(0, 2, 1))
    snap = np.array([n_steps], dtype=np.int64)
    out = np.empty((1, d, d), dtype=np.complex128)

    def run(backend):
        rho = np.ascontiguousarray(rho0.copy())
        backend.rk4_steps(K, np.ascontiguousarray(K.conj().T), Ls_arr, Lds,
                          rho, dt, snap, out)

    return _report(f"rk4 {dim_label} x {n_steps} steps", run)


def _report(label: str, run):
    t_pure = _time(lambda: run(pure))
    if compiled is None:
        print(f"{label:<38s} pure {t_pure * 1e3:8.1f} ms   (no extension built)")
        return
    t_c = _time(lambda: run(compiled))
    print(f"{label:<38s} pure {t_pure * 1e3:8.1f} ms   "
          f"compiled {t_c * 1e3:8.1f} ms   speedup {t_pure / t_c:5.1f}x")


def main():
    p = validate.caption_parameters()
    m = effective.derive_effective_model(p)
    ops = model.build_bare_operators(p)

    rho4 = np.zeros((4, 4), dtype=np.complex128)
    rho4[0, 0] = 1.0
    rho18 = np.outer(model.computational_ket(0, 0, 0),
                     model.computational_ket(0, 0, 0))

    sup4 = dynamics.liouvillian_matrix(m.H_eff, m.L_eff)
    sup18 = dynamics.liouvillian_matrix(ops.hamiltonian, ops.L)

    print(f"kernel backend available: "
          f"{'compiled + pure' if compiled is not None else 'pure only'}")
    propagate_case("16x16", sup4, rho4.reshape(-1, order="F"), 50000)
    propagate_case("324x324", sup18, rho18.reshape(-1, order="F"), 2000)
    rk4_case("4x4", m.H_eff, m.L_eff, rho4, 20000, 0.01)
    rk4_case("18x18", ops.hamiltonian, ops.L, rho18, 5000, 0.005)


if __name__ == "__main__":
    main()
