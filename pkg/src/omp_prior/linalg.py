"""Dense linear-algebra primitives for desk-scale recovery problems.

Everything here is a pure function over numpy arrays. Problems are small
(a few hundred rows/columns at most), so least squares is solved by a
fresh QR factorization on every call rather than by incremental updates;
that keeps results bit-stable across call orders.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, EigenFailureError, RankDeficientError

# Smallest Gram eigenvalue below RANK_TOLERANCE times the largest means the
# column set is treated as rank deficient.
RANK_TOLERANCE = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d float array and require finite entries."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-d array, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def as_vector(a) -> np.ndarray:
    """Coerce to a 1-d float array and require finite entries."""
    v = np.asarray(a, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-d array, got shape {v.shape}")
    if v.size and not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def _check_full_column_rank(basis: np.ndarray) -> None:
    gram = basis.T @ basis
    try:
        eigs = np.linalg.eigvalsh(gram)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defective input
        raise EigenFailureError(str(exc)) from exc
    if eigs[-1] <= 0.0 or eigs[0] < RANK_TOLERANCE * eigs[-1]:
        raise RankDeficientError(
            f"column set of shape {basis.shape} is numerically rank deficient "
            f"(gram eigenvalue ratio {eigs[0]:.3e} / {eigs[-1]:.3e})"
        )


def least_squares(basis, target) -> np.ndarray:
    """Coefficients u minimizing ||target - basis @ u||_2.

    ``basis`` must have full column rank; a zero-column basis yields an
    empty coefficient vector. Raises RankDeficientError when the Gram
    matrix is numerically singular, which signals an invalid support set.
    """
    B = as_matrix(basis)
    y = as_vector(target)
    if B.shape[0] != y.shape[0]:
        raise DimensionMismatchError(
            f"basis has {B.shape[0]} rows but target has length {y.shape[0]}"
        )
    if B.shape[1] == 0:
        return np.zeros(0)
    _check_full_column_rank(B)
    q, r = np.linalg.qr(B, mode="reduced")
    return scipy.linalg.solve_triangular(r, q.T @ y)


def projection_residual(basis, target) -> np.ndarray:
    """Component of ``target`` orthogonal to the span of ``basis`` columns.

    An empty basis (zero columns) projects onto nothing and returns the
    target unchanged.
    """
    B = as_matrix(basis)
    y = as_vector(target)
    if B.shape[1] == 0:
        if B.shape[0] not in (0, y.shape[0]):
            raise DimensionMismatchError(
                f"basis has {B.shape[0]} rows but target has length {y.shape[0]}"
            )
        return y.copy()
    return y - B @ least_squares(B, y)


def gram_extremes(sub) -> tuple[float, float]:
    """Smallest and largest eigenvalues of sub' @ sub, ascending.

    Tiny negative eigenvalues from roundoff are clamped to zero; the Gram
    matrix is positive semdefinite by construction.
    """
    s = as_matrix(sub)
    if s.shape[0] == 0 or s.shape[1] == 0:
        raise DimensionMismatchError("gram_extremes needs a non-empty matrix")
    gram = s.T @ s
    try:
        eigs = np.linalg.eigvalsh(gram)
    except np.linalg.LinAlgError as exc:
        raise EigenFailureError(str(exc)) from exc
    return max(float(eigs[0]), 0.0), max(float(eigs[-1]), 0.0)
