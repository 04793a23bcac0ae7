"""Dense vector/matrix helpers restricted to index supports.

Supports are sorted tuples of 0-based coordinate indices. Every function is
pure; inputs are never modified.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import NumericalSingularityError

SYM_TOL = 1e-9
EPS_CLAMP = 1e-8

IndexSet = tuple[int, ...]


def as_index_set(indices: Iterable[int], d: int | None = None) -> IndexSet:
    """Normalize an iterable of indices into a sorted, duplicate-free tuple."""
    out = tuple(sorted({int(i) for i in indices}))
    if d is not None and out and (out[0] < 0 or out[-1] >= d):
        raise ValueError(f"indices {out} outside [0, {d})")
    return out


def support(v: ArrayLike) -> IndexSet:
    """Indices of exactly nonzero entries."""
    return tuple(int(i) for i in np.flatnonzero(np.asarray(v)))


def restrict_vector(z: ArrayLike, idx: Iterable[int]) -> NDArray[np.float64]:
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    keep = list(idx)
    out[keep] = z[keep]
    return out


def restrict_matrix(A: ArrayLike, idx: Iterable[int]) -> NDArray[np.float64]:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    keep = np.asarray(list(idx), dtype=int)
    out = np.zeros_like(A)
    out[np.ix_(keep, keep)] = A[np.ix_(keep, keep)]
    return out


def weighted_norm(z: ArrayLike, A: ArrayLike, tol: float = SYM_TOL) -> float:
    """``sqrt(z^T A z)`` for a symmetric positive semi-definite ``A``.

    Raises
    ------
    ValueError
        If ``A`` is asymmetric beyond ``tol`` or the quadratic form is
        negative beyond ``-tol`` (a PSD violation).
    """
    z = np.asarray(z, dtype=float)
    A = np.asarray(A, dtype=float)
    if np.max(np.abs(A - A.T), initial=0.0) > tol:
        raise ValueError("weighted_norm: matrix is not symmetric")
    quad = float(z @ A @ z)
    if quad < -tol:
        raise ValueError(f"weighted_norm: negative quadratic form {quad:.3e}; matrix is not PSD")
    return float(np.sqrt(max(quad, 0.0)))


def pinv_on_support(D: ArrayLike, H: Iterable[int]) -> NDArray[np.float64]:
    """Inverse of the ``H x H`` block of ``D``, re-embedded with zeros elsewhere.

    The block is symmetric positive definite whenever it comes from
    ``(alpha I)_H + sum x x^T`` with ``alpha > 0``; a Cholesky failure therefore
    means corrupted state and is reported as :class:`NumericalSingularityError`.
    """
    D = np.asarray(D, dtype=float)
    keep = np.asarray(list(H), dtype=int)
    out = np.zeros_like(D)
    if keep.size == 0:
        return out
    block = D[np.ix_(keep, keep)]
    try:
        chol = np.linalg.cholesky(block)
    except np.linalg.LinAlgError as exc:
        raise NumericalSingularityError(
            f"design block on support of size {keep.size} is not positive definite"
        ) from exc
    diag = np.abs(np.diag(chol))
    if (diag.max() / diag.min()) ** 2 > 1e14:
        raise NumericalSingularityError("design block is numerically singular")
    inv_l = np.linalg.inv(chol)
    inv = inv_l.T @ inv_l
    out[np.ix_(keep, keep)] = 0.5 * (inv + inv.T)
    return out


def clamp_small(x: ArrayLike | float, eps: float = EPS_CLAMP):
    """Zero out entries with ``|x| <= eps``; scalars in, scalars out."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if np.isscalar(x):
        return 0.0 if abs(x) <= eps else float(x)
    arr = np.array(x, dtype=float)
    arr[np.abs(arr) <= eps] = 0.0
    return arr
