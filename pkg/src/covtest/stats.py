"""Sample moments and the trace functionals the score statistics reduce to.

Data matrices are p x n: each column is one observation.
"""
import numpy as np

from ._validation import check_data_matrix, check_cov_matrix
from .exceptions import DomainError
from .nullspec import GENERAL, SPHERICITY, NullSpec


def sample_mean(X):
    """Column average of a p x n data matrix."""
    X = check_data_matrix(X, min_samples=1)
    return X.mean(axis=1)


def center(X):
    """Subtract the sample mean from every column."""
    X = check_data_matrix(X, min_samples=1)
    return X - X.mean(axis=1, keepdims=True)


def sample_cov(X, divisor="n"):
    """Sample covariance matrix.

    Parameters
    ----------
    X : array_like, shape (p, n)
    divisor : {"n", "n-1"}
        ``"n"`` gives the maximum likelihood estimate, ``"n-1"`` the unbiased one.
    """
    X = check_data_matrix(X)
    n = X.shape[1]
    if divisor == "n":
        d = n
    elif divisor in ("n-1", "n - 1"):
        d = n - 1
    else:
        raise ValueError(f"divisor must be 'n' or 'n-1', got {divisor!r}")
    # two-pass: mean first, then centered outer products
    Y = X - X.mean(axis=1, keepdims=True)
    S = (Y @ Y.T) / d
    return 0.5 * (S + S.T)


def trace_sq_dev(S):
    """tr[(S - I)^2] = tr(S^2) - 2 tr(S) + p, from a single matrix product."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {S.shape}")
    p = S.shape[0]
    # tr(S @ S) without forming the product
    tr_s2 = float(np.einsum("ij,ji->", S, S))
    return tr_s2 - 2.0 * float(np.trace(S)) + p


def gram_trace_sq_dev(Y, scale):
    """tr[(Y Y' / scale - I)^2] for a p x n matrix ``Y``.

    Uses the smaller of the p x p and n x n Gram matrices, since
    tr((Y Y')^2) = tr((Y' Y)^2).
    """
    p, n = Y.shape
    G = Y.T @ Y if n < p else Y @ Y.T
    tr_s = float(np.einsum("ij,ij->", Y, Y)) / scale
    tr_s2 = float(np.einsum("ij,ij->", G, G)) / scale**2
    return tr_s2 - 2.0 * tr_s + p


def inverse_sqrt(sigma0):
    """Symmetric inverse square root of a positive definite matrix."""
    S, _ = check_cov_matrix(sigma0)
    w, V = np.linalg.eigh(S)
    if w.min() <= 0:
        raise DomainError("sigma0 is not positive definite")
    return (V / np.sqrt(w)) @ V.T


def standardize(X, null):
    """Residuals x_i - mean mapped to unit covariance under ``null``."""
    Y = center(X)
    if null.kind == GENERAL:
        return inverse_sqrt(null.sigma0) @ Y
    if null.kind == SPHERICITY:
        p, n = Y.shape
        gamma = float(np.einsum("ij,ij->", Y, Y)) / (p * (n - 1))
        if gamma <= 0:
            raise DomainError("sample has zero total variance; sphericity scale is undefined")
        return Y / np.sqrt(gamma)
    return Y


def estimate_beta(X, null=None):
    """Fourth-moment parameter beta = E xi^4 - 3 from standardized residuals.

    Averages the fourth power of every entry of the standardized residual
    matrix and subtracts 3 (the real Gaussian value).
    """
    X = check_data_matrix(X)
    null = NullSpec.identity() if null is None else null
    if null.kind == GENERAL:
        check_cov_matrix(null.sigma0, p=X.shape[0])
    Z = standardize(X, null)
    return float(np.mean(Z**4)) - 3.0
