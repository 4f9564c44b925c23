"""Dense complex linear algebra for small systems (n <= ~32).

Points in the plane are ``complex`` scalars and matrices are numpy
``complex128`` arrays. Factorizations use Gaussian elimination with partial
pivoting on the modulus, which is robust and more than fast enough at this
scale; no eigensolver is ever needed.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateKernelError, DimensionError, SingularMatrixError

SINGULAR_TOL = 1e-9

__all__ = [
    "SINGULAR_TOL",
    "lu_determinant",
    "left_null_vector",
    "mat_vec",
    "rank_deficient",
    "solve",
]


def _square(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def _lu(m: np.ndarray):
    """In-place LU with partial pivoting on modulus.

    Returns ``(a, perm, sign, pivots)`` where ``a`` packs L (unit diagonal,
    strictly below) and U, ``perm`` maps factored rows to original rows,
    ``sign`` is the permutation sign and ``pivots`` the pivot moduli in
    elimination order.
    """
    a = np.array(m, dtype=np.complex128)
    n = a.shape[0]
    perm = list(range(n))
    sign = 1.0
    pivots = np.empty(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if p != k:
            a[[k, p], :] = a[[p, k], :]
            perm[k], perm[p] = perm[p], perm[k]
            sign = -sign
        piv = a[k, k]
        pivots[k] = abs(piv)
        if piv != 0:
            a[k + 1 :, k] /= piv
            a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
    return a, perm, sign, pivots


def lu_determinant(m) -> complex:
    """Determinant via LU with partial pivoting."""
    a = _square(m)
    lu, _, sign, _ = _lu(a)
    return complex(sign * np.prod(np.diag(lu)))


def rank_deficient(m, tol: float = SINGULAR_TOL) -> bool:
    """True when the smallest pivot falls below ``tol`` times the largest.

    The zero matrix is reported deficient.
    """
    a = _square(m)
    _, _, _, pivots = _lu(a)
    largest = pivots.max()
    if largest == 0.0:
        return True
    return bool(pivots.min() < tol * largest)


def solve(m, b) -> np.ndarray:
    """Solve ``m x = b`` by LU with partial pivoting."""
    a = _square(m)
    rhs = np.asarray(b, dtype=np.complex128)
    n = a.shape[0]
    if rhs.shape != (n,):
        raise DimensionError(f"rhs shape {rhs.shape} does not match matrix of order {n}")
    lu, perm, _, pivots = _lu(a)
    largest = pivots.max()
    if largest == 0.0 or pivots.min() < 1e-14 * largest:
        raise SingularMatrixError("matrix is singular to working precision")
    y = rhs[perm].copy()
    for i in range(1, n):
        y[i] -= lu[i, :i] @ y[:i]
    x = np.zeros(n, dtype=np.complex128)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - lu[i, i + 1 :] @ x[i + 1 :]) / lu[i, i]
    return x


def left_null_vector(m, tol: float = 1e-9) -> np.ndarray:
    """One-dimensional left kernel of a rank n-1 matrix.

    Returns ``v`` with ``max|v^T m| < tol``, normalized so the components sum
    to one. The kernel is read off the LU factorization of the transpose: the
    row of the single negligible pivot is freed and the remaining triangular
    system back-substituted.

    Raises ``DegenerateKernelError`` when the detected kernel dimension is
    not exactly one or the vector cannot be normalized.
    """
    a = _square(m)
    n = a.shape[0]
    lu, _, _, pivots = _lu(a.T.copy())
    largest = pivots.max()
    if largest == 0.0:
        if n == 1:
            return np.array([1.0 + 0.0j])
        raise DegenerateKernelError("zero matrix has an n-dimensional kernel")
    small = np.nonzero(pivots < tol * largest)[0]
    if small.size != 1:
        raise DegenerateKernelError(
            f"kernel dimension {small.size} detected, expected 1 (tol={tol:g})"
        )
    k = int(small[0])
    v = np.zeros(n, dtype=np.complex128)
    v[k] = 1.0
    for i in range(k - 1, -1, -1):
        v[i] = -(lu[i, i + 1 :] @ v[i + 1 :]) / lu[i, i]
    total = v.sum()
    if abs(total) < tol * np.abs(v).max():
        raise DegenerateKernelError("kernel vector sums to ~0 and cannot be normalized")
    v = v / total
    residual = float(np.abs(v @ a).max())
    if residual >= tol:
        raise DegenerateKernelError(
            f"left kernel residual {residual:.3e} exceeds tol {tol:g}"
        )
    return v


def mat_vec(m, v) -> np.ndarray:
    """Plain complex matrix-vector product with shape validation."""
    a = np.asarray(m, dtype=np.complex128)
    x = np.asarray(v, dtype=np.complex128)
    if a.ndim != 2 or x.ndim != 1 or a.shape[1] != x.shape[0]:
        raise DimensionError(f"cannot multiply shape {a.shape} by shape {x.shape}")
    return a @ x
