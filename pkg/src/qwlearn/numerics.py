"""Small dense linear-algebra kernel shared by the estimators.

Two solvers: minimum-norm least squares via SVD (the n < p sweep datasets
make the underdetermined case the norm here) and the closed-form ridge
solve.  Both are thin, validated wrappers over LAPACK routines.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from .errors import InvalidParameterError, NumericalFailureError, ShapeError

DEFAULT_RCOND = 1e-12


def _as_matrix(name: str, a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"{name} must be a nonempty 2-D matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise InvalidParameterError(f"{name} contains non-finite entries")
    return a


def lstsq_min_norm(a, b, rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Minimum-Euclidean-norm X minimizing ||A X - B||_2.

    Computed from the SVD of A; singular values below rcond * sigma_max are
    treated as zero.  Exact on full-rank square systems.
    """
    a = _as_matrix("a", a)
    b = _as_matrix("b", b)
    if a.shape[0] != b.shape[0]:
        raise ShapeError(
            f"row counts differ: a has {a.shape[0]}, b has {b.shape[0]}"
        )
    if not (math.isfinite(rcond) and rcond >= 0):
        raise InvalidParameterError(f"rcond must be >= 0, got {rcond!r}")
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"SVD did not converge: {exc}") from None
    keep = s > rcond * s[0]
    if not keep.any():
        return np.zeros((a.shape[1], b.shape[1]))
    u_k = u[:, keep]
    vt_k = vt[keep]
    return vt_k.T @ ((u_k.T @ b) / s[keep, None])


def ridge_solve(a, b, alpha: float) -> np.ndarray:
    """X = (A^T A + alpha I)^{-1} A^T B via a Cholesky solve of the SPD system."""
    a = _as_matrix("a", a)
    b = _as_matrix("b", b)
    if a.shape[0] != b.shape[0]:
        raise ShapeError(
            f"row counts differ: a has {a.shape[0]}, b has {b.shape[0]}"
        )
    if not (math.isfinite(alpha) and alpha > 0):
        raise InvalidParameterError(f"alpha must be > 0, got {alpha!r}")
    gram = a.T @ a
    gram[np.diag_indices_from(gram)] += alpha
    rhs = a.T @ b
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"Cholesky factorization failed: {exc}") from None
    return scipy.linalg.cho_solve(factor, rhs)
