"""Input validation helpers shared by the public functions and estimators."""
import numpy as np

from .exceptions import DomainError

SYMMETRY_RTOL = 1e-12
UNITY_ATOL = 1e-8


def check_data_matrix(X, min_samples=2):
    """Validate a p x n data matrix (columns are observations).

    Returns a float64 2-D array. One-dimensional input is read as a single
    variable observed ``len(X)`` times.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    if X.ndim != 2:
        raise DomainError(f"data matrix must be 2-D, got shape {X.shape}")
    p, n = X.shape
    if p < 1:
        raise DomainError("data matrix needs at least one variable")
    if n < min_samples:
        raise DomainError(f"need at least {min_samples} observations, got n={n}")
    if not np.all(np.isfinite(X)):
        raise DomainError("data matrix contains non-finite entries")
    return X


def check_cov_matrix(S, p=None, positive_definite=True):
    """Validate a symmetric (optionally positive definite) p x p matrix.

    Returns ``(S, L)`` with ``L`` the lower Cholesky factor, or ``None`` when
    ``positive_definite`` is false.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DomainError(f"covariance matrix must be square, got shape {S.shape}")
    if p is not None and S.shape[0] != p:
        raise DomainError(f"covariance matrix has dimension {S.shape[0]}, data has p={p}")
    if not np.all(np.isfinite(S)):
        raise DomainError("covariance matrix contains non-finite entries")
    scale = max(np.abs(S).max(), np.finfo(float).tiny)
    if np.abs(S - S.T).max() > SYMMETRY_RTOL * scale:
        raise DomainError("covariance matrix is not symmetric")
    if not positive_definite:
        return S, None
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise DomainError("covariance matrix is not positive definite") from None
    return S, L


def check_ratio(q):
    """Reject non-positive ratios."""
    q = float(q)
    if not np.isfinite(q) or q <= 0:
        raise DomainError(f"dimension ratio must be positive and finite, got {q}")
    return q
