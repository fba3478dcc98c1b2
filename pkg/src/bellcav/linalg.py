"""Dense complex linear-algebra kernels shared by the whole package.

Every operator handled here is a small (<= 324 x 324) dense complex
matrix, so this module is a thin, contract-checked layer over LAPACK
through numpy/scipy: LU with partial pivoting for inversion, scaling
and squaring for the matrix exponential, dense Hermitian eigensolves
for positivity diagnostics.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .exceptions import (
    DimensionMismatchError,
    NonHermitianError,
    NormOverflowError,
    SingularMatrixError,
)

__all__ = [
    "as_square",
    "adjoint",
    "frobenius",
    "tensor_product",
    "invert",
    "matrix_exponential",
    "min_eigenvalue_hermitian",
]


def as_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Validate and return `a` as a C-contiguous square complex matrix."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the ((i*db+k),(j*db+l)) entry convention."""
    a = as_square(a, "tensor factor a")
    b = as_square(b, "tensor factor b")
    return np.kron(a, b)


def invert(a: np.ndarray, pivot_rtol: float = 1e-14) -> np.ndarray:
    """Invert via LU with partial pivoting.

    Raises SingularMatrixError when the smallest pivot magnitude falls
    below pivot_rtol * ||a||_F.
    """
    a = as_square(a)
    n = a.shape[0]
    with np.errstate(all="ignore"), warnings.catch_warnings():
        # exact singularity is reported through SingularMatrixError below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a)
    threshold = pivot_rtol * frobenius(a)
    pivots = np.abs(np.diagonal(lu))
    if pivots.min() <= threshold:
        raise SingularMatrixError(
            f"pivot {pivots.min():.3e} below threshold {threshold:.3e}"
        )
    return scipy.linalg.lu_solve((lu, piv), np.eye(n, dtype=np.complex128))


def matrix_exponential(a: np.ndarray, max_norm: float = 1e3) -> np.ndarray:
    """e^a by scaling-and-squaring (Pade core via scipy).

    Refuses inputs with ||a||_F above max_norm: far outside the regime
    this package needs, and where phase cancellation makes the result
    meaningless at double precision.
    """
    a = as_square(a)
    norm = frobenius(a)
    if norm > max_norm:
        raise NormOverflowError(f"||a||_F = {norm:.3e} exceeds bound {max_norm:.3e}")
    return scipy.linalg.expm(a)


def min_eigenvalue_hermitian(a: np.ndarray, herm_rtol: float = 1e-8) -> float:
    """Smallest eigenvalue of the Hermitian part of `a`.

    The input must already be Hermitian to herm_rtol * ||a||_F; the
    symmetrisation only absorbs roundoff, never disguises a bug.
    """
    a = as_square(a)
    scale = frobenius(a)
    dev = frobenius(a - adjoint(a))
    if scale > 0 and dev > herm_rtol * scale:
        raise NonHermitianError(
            f"||a - a^dag||_F = {dev:.3e} exceeds {herm_rtol:.1e} * ||a||_F"
        )
    herm = 0.5 * (a + adjoint(a))
    return float(np.linalg.eigvalsh(herm)[0])
