"""scikit-learn style front end for the covariance structure tests.

Unlike the functional API, estimators follow the scikit-learn convention:
``X`` has shape (n_samples, n_features), one observation per row.
"""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array

from .nullspec import GENERAL, NullSpec
from .scoretest import GREATER, crst_statistic, rst_statistic


def make_null(null, sigma0=None):
    """Build a NullSpec from an estimator's ``null``/``sigma0`` parameters."""
    if isinstance(null, NullSpec):
        return null
    if sigma0 is not None:
        if null not in (None, "identity", GENERAL):
            raise ValueError(f"sigma0 cannot be combined with null={null!r}")
        return NullSpec.general(sigma0)
    return NullSpec(null or "identity")


class _CovarianceTest(BaseEstimator):
    def _validate(self, X):
        X = check_array(X, dtype=np.float64, ensure_min_samples=2)
        self.n_samples_, self.n_features_in_ = X.shape
        return X.T

    def _store(self, result):
        self.result_ = result
        self.statistic_ = result.statistic
        self.pvalue_ = result.p_value
        return self

    def _check_fitted(self):
        if not hasattr(self, "result_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet; call fit(X) first")

    def decision(self, alpha=0.05):
        """True when H0 is rejected at level ``alpha``."""
        self._check_fitted()
        return self.result_.reject_at(alpha)

    def fit_test(self, X, y=None):
        """Fit and return the :class:`~covtest.scoretest.TestResult`."""
        return self.fit(X, y).result_


class RaoScoreTest(_CovarianceTest):
    """Classical Rao's score test with a chi-square reference.

    Parameters
    ----------
    null : {"identity", "sphericity", "general"} or NullSpec
    sigma0 : array_like of shape (p, p), optional
        Hypothesized covariance; implies ``null="general"``.
    """

    def __init__(self, null="identity", sigma0=None):
        self.null = null
        self.sigma0 = sigma0

    def fit(self, X, y=None):
        return self._store(rst_statistic(self._validate(X), make_null(self.null, self.sigma0)))


class CorrectedRaoScoreTest(_CovarianceTest):
    """Random-matrix corrected Rao's score test with a N(0, 1) reference.

    Parameters
    ----------
    null : {"identity", "sphericity", "general"} or NullSpec
    sigma0 : array_like of shape (p, p), optional
    beta : float or "estimate", default 0.0
        Fourth-moment parameter of the standardized entries (0 for Gaussian data).
    kappa : {1, 2}, default 2
    alternative : {"greater", "two-sided"}, default "greater"
    """

    def __init__(self, null="identity", sigma0=None, beta=0.0, kappa=2, alternative=GREATER):
        self.null = null
        self.sigma0 = sigma0
        self.beta = beta
        self.kappa = kappa
        self.alternative = alternative

    def fit(self, X, y=None):
        result = crst_statistic(
            self._validate(X), make_null(self.null, self.sigma0), self.beta, self.kappa,
            self.alternative,
        )
        self.beta_ = result.detail.beta_used
        return self._store(result)
