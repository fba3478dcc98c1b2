# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled time-stepping kernels.

Same contracts as bellcav._kernels.pure; the inner loops run without
the interpreter, with BLAS doing the matrix products.  This is where
long sweeps spend their time: tens of thousands of propagator
applications per grid point on matrices small enough that python-call
overhead would otherwise dominate.
"""

import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_blas cimport zgemm, zgemv

ctypedef double complex zcomplex

cnp.import_array()

cdef zcomplex Z_ONE = 1.0 + 0.0j
cdef zcomplex Z_ZERO = 0.0 + 0.0j
cdef char TRANS_T = b'T'
cdef char TRANS_N = b'N'


cdef inline void _matvec(int n, zcomplex* p, zcomplex* x, zcomplex* y) noexcept nogil:
    # y = P @ x with P row-major: BLAS sees the buffer as P^T, so ask for
    # the transposed product.
    cdef int inc = 1
    zgemv(&TRANS_T, &n, &n, &Z_ONE, p, &n, x, &inc, &Z_ZERO, y, &inc)


cdef inline void _matmul_acc(int n, zcomplex* a, zcomplex* b, zcomplex* c,
                             zcomplex beta) noexcept nogil:
    # c = a @ b + beta * c, all row-major: compute c^T = b^T a^T column-major.
    zgemm(&TRANS_N, &TRANS_N, &n, &n, &n, &Z_ONE, b, &n, a, &n, &beta, c, &n)


def propagate_steps(cnp.complex128_t[:, ::1] P, cnp.complex128_t[::1] v,
                    cnp.int64_t[::1] snap_steps, cnp.complex128_t[:, ::1] out):
    """Iterate v <- P @ v, snapshotting into out[i] at step snap_steps[i]."""
    cdef int n = P.shape[0]
    cdef Py_ssize_t n_snaps = snap_steps.shape[0]
    cdef long n_steps = snap_steps[n_snaps - 1] if n_snaps > 0 else 0
    cdef cnp.complex128_t[::1] tmp = np.empty(n, dtype=np.complex128)
    cdef long k
    cdef Py_ssize_t i = 0, j
    with nogil:
        for k in range(1, n_steps + 1):
            _matvec(n, &P[0, 0], &v[0], &tmp[0])
            for j in range(n):
                v[j] = tmp[j]
            if i < n_snaps and k == snap_steps[i]:
                for j in range(n):
                    out[i, j] = v[j]
                i += 1


cdef void _rhs(int n, int n_ops,
               zcomplex* K, zcomplex* Kd, zcomplex* Ls, zcomplex* Lds,
               zcomplex* rho, zcomplex* scratch, zcomplex* out) noexcept nogil:
    # out = K rho + rho K^dag + sum_k L_k rho L_k^dag
    cdef int m
    _matmul_acc(n, K, rho, out, Z_ZERO)
    _matmul_acc(n, rho, Kd, out, Z_ONE)
    for m in range(n_ops):
        _matmul_acc(n, Ls + m * n * n, rho, scratch, Z_ZERO)
        _matmul_acc(n, scratch, Lds + m * n * n, out, Z_ONE)


def rk4_steps(cnp.complex128_t[:, ::1] K, cnp.complex128_t[:, ::1] Kd,
              cnp.complex128_t[:, :, ::1] Ls, cnp.complex128_t[:, :, ::1] Lds,
              cnp.complex128_t[:, ::1] rho, double dt,
              cnp.int64_t[::1] snap_steps, cnp.complex128_t[:, :, ::1] out):
    """Classic fixed-step RK4 on the matrix-valued master equation."""
    cdef int n = K.shape[0]
    cdef int n_ops = Ls.shape[0]
    cdef Py_ssize_t n_snaps = snap_steps.shape[0]
    cdef long n_steps = snap_steps[n_snaps - 1] if n_snaps > 0 else 0
    cdef cnp.complex128_t[:, :, ::1] work = np.empty((6, n, n), dtype=np.complex128)
    cdef zcomplex* k1 = &work[0, 0, 0]
    cdef zcomplex* k2 = &work[1, 0, 0]
    cdef zcomplex* k3 = &work[2, 0, 0]
    cdef zcomplex* k4 = &work[3, 0, 0]
    cdef zcomplex* stage = &work[4, 0, 0]
    cdef zcomplex* scratch = &work[5, 0, 0]
    cdef zcomplex* r = &rho[0, 0]
    cdef zcomplex* ls = &Ls[0, 0, 0] if n_ops > 0 else NULL
    cdef zcomplex* lds = &Lds[0, 0, 0] if n_ops > 0 else NULL
    cdef double sixth = dt / 6.0
    cdef long k
    cdef Py_ssize_t i = 0
    cdef int j, nn = n * n
    with nogil:
        for k in range(1, n_steps + 1):
            _rhs(n, n_ops, &K[0, 0], &Kd[0, 0], ls, lds, r, scratch, k1)
            for j in range(nn):
                stage[j] = r[j] + 0.5 * dt * k1[j]
            _rhs(n, n_ops, &K[0, 0], &Kd[0, 0], ls, lds, stage, scratch, k2)
            for j in range(nn):
                stage[j] = r[j] + 0.5 * dt * k2[j]
            _rhs(n, n_ops, &K[0, 0], &Kd[0, 0], ls, lds, stage, scratch, k3)
            for j in range(nn):
                stage[j] = r[j] + dt * k3[j]
            _rhs(n, n_ops, &K[0, 0], &Kd[0, 0], ls, lds, stage, scratch, k4)
            for j in range(nn):
                r[j] = r[j] + sixth * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            if i < n_snaps and k == snap_steps[i]:
                for j in range(nn):
                    (&out[i, 0, 0])[j] = r[j]
                i += 1
