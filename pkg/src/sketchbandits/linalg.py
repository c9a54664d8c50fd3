"""Small dense linear-algebra kernels.

Everything here works on plain ``numpy`` arrays. Matrices are small enough
(``m`` rarely above a few hundred, ``d`` at most a few thousand) that LAPACK
through ``numpy.linalg`` is the right tool; the wrappers exist to pin the
output conventions (descending order, eigenvectors as rows) and to reject bad
input early.
"""

from dataclasses import dataclass

import numpy as np


class LinAlgInputError(ValueError):
    """Raised when a kernel receives malformed input."""


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition ``A = sum_i values[i] * outer(vectors[i], vectors[i])``.

    ``values`` is sorted non-increasing and ``vectors`` holds one orthonormal
    eigenvector per row.
    """

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        return (self.vectors.T * self.values) @ self.vectors


def _as_finite_matrix(A, name="A"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise LinAlgInputError(f"{name} must be 2-d, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise LinAlgInputError(f"{name} has non-finite entries")
    return A


def sym_eig(A, rtol=1e-10):
    """Full eigendecomposition of a symmetric matrix, eigenvalues descending."""
    A = _as_finite_matrix(A)
    n, k = A.shape
    if n != k:
        raise LinAlgInputError(f"matrix must be square, got {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if np.max(np.abs(A - A.T), initial=0.0) > rtol * scale:
        raise LinAlgInputError("matrix is not symmetric")
    w, V = np.linalg.eigh(A)
    order = np.argsort(w)[::-1]
    return SymEig(values=w[order], vectors=V[:, order].T.copy())


def thin_svd_rows(M):
    """Thin SVD of a short-fat ``m x d`` matrix.

    Returns ``(sigma, Vt)`` with ``sigma`` of length ``m`` (descending, >= 0)
    and ``Vt`` an ``m x d`` matrix of orthonormal right singular vectors, so
    that ``M.T @ M == Vt.T @ diag(sigma**2) @ Vt``. Cost is ``O(m^2 d)``; no
    ``d x d`` intermediate is formed.
    """
    M = _as_finite_matrix(M, "M")
    m, d = M.shape
    if m > d:
        raise LinAlgInputError(f"expected m <= d, got {m} x {d}")
    _, sigma, Vt = np.linalg.svd(M, full_matrices=False)
    return sigma, Vt


def apply(A, v):
    """Matrix-vector product with a conformance check."""
    A = np.asarray(A, dtype=float)
    v = np.asarray(v, dtype=float)
    if A.ndim != 2 or v.ndim != 1 or A.shape[1] != v.shape[0]:
        raise LinAlgInputError(
            f"cannot apply matrix of shape {A.shape} to vector of shape {v.shape}"
        )
    return A @ v


def clamp_psd(values, floor=0.0):
    """Zero out negative (rounding) eigenvalues of a PSD spectrum."""
    values = np.asarray(values, dtype=float)
    return np.where(values < floor, 0.0, values)
