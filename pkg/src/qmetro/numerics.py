"""Dense complex linear-algebra substrate.

Everything downstream (states, QFIM engines, Lindblad propagation) is built on
the four operations here: Hermitian eigendecomposition, matrix exponential,
spectral pseudo-inverse and Kronecker products.  They are thin, validating
wrappers over LAPACK via numpy/scipy; all tolerances are relative to the input
norm unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError

# Default absolute tolerance for scalar/matrix comparisons in this package.
DEFAULT_ATOL = 1e-8

HERMITICITY_RTOL = 1e-10

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array, raising DomainError otherwise."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DomainError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise DomainError(f"{name} contains NaN or Inf entries")
    return a


def dag(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(m)).T


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m)))


def is_hermitian(m, rtol: float = HERMITICITY_RTOL, atol: float = 1e-13) -> bool:
    a = np.asarray(m)
    return frobenius_norm(a - dag(a)) <= rtol * max(frobenius_norm(a), 1.0) + atol


@dataclass(frozen=True)
class HermitianEig:
    """Spectral factorization of a Hermitian matrix.

    ``eigenvalues`` are ascending; the columns of ``eigenvectors`` are the
    matching orthonormal eigenvectors.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(m) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    m : array_like
        Square matrix with ``||m - m†|| <= 1e-10 ||m||``.

    Returns
    -------
    HermitianEig
        Ascending eigenvalues and orthonormal eigenvector columns so that
        ``V diag(w) V† = m`` to relative accuracy ``1e-9``.
    """
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DomainError(f"hermitian_eig requires a square matrix, got {a.shape}")
    if not is_hermitian(a):
        raise DomainError("hermitian_eig requires a Hermitian matrix")
    w, v = np.linalg.eigh((a + dag(a)) / 2.0)
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def matrix_exp(m) -> np.ndarray:
    """Matrix exponential exp(m).

    Uses a spectral path for Hermitian or anti-Hermitian input and
    scaling-and-squaring (scipy's Pade implementation) otherwise.
    """
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DomainError(f"matrix_exp requires a square matrix, got {a.shape}")
    if is_hermitian(a):
        eig = hermitian_eig(a)
        return (eig.eigenvectors * np.exp(eig.eigenvalues)) @ dag(eig.eigenvectors)
    if is_hermitian(1j * a):
        eig = hermitian_eig(1j * a)
        return (eig.eigenvectors * np.exp(-1j * eig.eigenvalues)) @ dag(eig.eigenvectors)
    return scipy.linalg.expm(a)


@dataclass(frozen=True)
class PseudoInverse:
    matrix: np.ndarray
    rank: int


def pseudo_inverse(m, tol: float = 1e-12) -> PseudoInverse:
    """Spectral (Moore-Penrose) pseudo-inverse of a Hermitian matrix.

    Eigenvalues with ``|w| < tol * max|w|`` are treated as zero and dropped;
    the effective rank is reported alongside the inverse.
    """
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1] or not is_hermitian(a):
        raise DomainError("pseudo_inverse requires a square Hermitian matrix")
    eig = hermitian_eig(a)
    w, v = eig.eigenvalues, eig.eigenvectors
    cutoff = tol * max(np.max(np.abs(w)), np.finfo(float).tiny)
    keep = np.abs(w) >= cutoff
    inv_w = np.zeros_like(w)
    inv_w[keep] = 1.0 / w[keep]
    pinv = (v * inv_w) @ dag(v)
    return PseudoInverse(matrix=pinv, rank=int(np.count_nonzero(keep)))


def kron(a, b) -> np.ndarray:
    """Kronecker product with entry ``(i*rows(b)+k, j*cols(b)+l) = a[i,j] b[k,l]``."""
    return np.kron(as_complex_matrix(a, "a"), as_complex_matrix(b, "b"))


def vec(m) -> np.ndarray:
    """Row-major vectorization: ``vec(A)[i*d + j] = A[i, j]``."""
    return np.asarray(m, dtype=complex).reshape(-1)


def unvec(v, dim: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`."""
    a = np.asarray(v, dtype=complex).reshape(-1)
    if dim is None:
        dim = int(round(np.sqrt(a.size)))
    if dim * dim != a.size:
        raise DomainError(f"cannot reshape length-{a.size} vector to a square matrix")
    return a.reshape(dim, dim)


def hermitian_part(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    return (a + dag(a)) / 2.0


def left_multiplier(a: np.ndarray) -> np.ndarray:
    """Superoperator of X -> A X in the row-major vec convention."""
    a = np.asarray(a, dtype=complex)
    return np.kron(a, np.eye(a.shape[0]))


def right_multiplier(a: np.ndarray) -> np.ndarray:
    """Superoperator of X -> X A in the row-major vec convention."""
    a = np.asarray(a, dtype=complex)
    return np.kron(np.eye(a.shape[0]), a.T)


def commutator_superop(a: np.ndarray) -> np.ndarray:
    """Superoperator of X -> [A, X] in the row-major vec convention."""
    return left_multiplier(a) - right_multiplier(a)
