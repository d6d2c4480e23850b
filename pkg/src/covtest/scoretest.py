"""Rao's score test (RST) and its random-matrix correction (CRST) for
H0: Sigma = Sigma0, Sigma = I and Sigma = gamma * I.

All functions take p x n data matrices (columns are observations). The
population mean is always treated as unknown and replaced by the sample mean.
"""
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import gammaincc

from ._validation import check_data_matrix
from .exceptions import DomainError
from .mp_law import check_not_unity, mp_integral_g
from .nullspec import GENERAL, SPHERICITY, NullSpec
from .rmt_clt import RmtParams, mean_correction, var_correction
from .stats import estimate_beta, gram_trace_sq_dev

NORMAL = "normal"
CHI2 = "chi2"
GREATER = "greater"
TWO_SIDED = "two-sided"
ESTIMATE = "estimate"


def normal_sf(x):
    """Upper tail P(Z > x) of the standard normal."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def chi_square_sf(x, df):
    """Upper tail P(X > x) of a chi-square with ``df`` degrees of freedom,
    via the regularized upper incomplete gamma function Q(df/2, x/2)."""
    if df < 1 or int(df) != df:
        raise DomainError(f"df must be a positive integer, got {df}")
    if x <= 0:
        return 1.0
    return float(gammaincc(0.5 * df, 0.5 * x))


@dataclass(frozen=True)
class CorrectionDetail:
    rst_raw: float
    f_qn_g: float
    mu_g: float
    upsilon_g: float
    q_n: float
    beta_used: float


@dataclass(frozen=True)
class TestResult:
    """Outcome of a covariance-structure test."""

    __test__ = False  # keep pytest from collecting this class

    test: str
    statistic: float
    reference: str
    p_value: float
    df: Optional[int] = None
    alternative: str = GREATER
    detail: Optional[CorrectionDetail] = field(default=None)

    def reject_at(self, alpha):
        """True when the test rejects H0 at significance level ``alpha``."""
        return self.p_value <= alpha

    def to_dict(self):
        out = {
            "test": self.test,
            "statistic": self.statistic,
            "reference": self.reference,
            "p_value": self.p_value,
            "alternative": self.alternative,
        }
        if self.df is not None:
            out["df"] = self.df
        if self.detail is not None:
            out["detail"] = asdict(self.detail)
        return out

    @classmethod
    def from_dict(cls, data):
        detail = data.get("detail")
        return cls(
            test=data["test"],
            statistic=float(data["statistic"]),
            reference=data["reference"],
            p_value=float(data["p_value"]),
            df=data.get("df"),
            alternative=data.get("alternative", GREATER),
            detail=CorrectionDetail(**detail) if detail is not None else None,
        )


def _whitened_residuals(X, null):
    """Centered data expressed in the coordinates where Sigma0 = I."""
    Y = X - X.mean(axis=1, keepdims=True)
    if null.kind == GENERAL:
        L = null.cholesky(X.shape[0])
        Y = solve_triangular(L, Y, lower=True, check_finite=False)
    return Y


def _sphericity_scale(Y):
    total = float(np.einsum("ij,ij->", Y, Y))
    if total <= 0:
        raise DomainError("sample has zero total variance; sphericity scale is undefined")
    return total


def _trace_sq_dev(X, null, divisor):
    """tr[(Sigma0^{-1} C - I)^2] for the sample covariance C with the given
    divisor; under sphericity Sigma0 is replaced by tr(C)/p * I."""
    p, n = X.shape
    Y = _whitened_residuals(X, null)
    if null.kind == SPHERICITY:
        # C / (tr(C)/p) = p Y Y' / tr(Y Y'), independent of the divisor
        return gram_trace_sq_dev(Y, _sphericity_scale(Y) / p)
    return gram_trace_sq_dev(Y, float(divisor))


def rst_df(p, null):
    df = p * (p + 1) // 2
    return df - 1 if null.kind == SPHERICITY else df


def rst_statistic(X, null=None):
    """Classical Rao's score statistic (n/2) tr[(Sigma0^{-1} Sigma_hat - I)^2].

    Sigma_hat uses divisor n. The reference distribution is chi-square with
    p(p+1)/2 degrees of freedom, one fewer under sphericity.
    """
    X = check_data_matrix(X)
    null = NullSpec.identity() if null is None else null
    p, n = X.shape
    stat = 0.5 * n * _trace_sq_dev(X, null, n)
    df = rst_df(p, null)
    return TestResult("rst", stat, CHI2, chi_square_sf(stat, df), df=df)


def crst_statistic(X, null=None, beta=0.0, kappa=2, alternative=GREATER):
    """Corrected Rao's score statistic, asymptotically N(0, 1) under H0.

    Parameters
    ----------
    X : array_like, shape (p, n)
    null : NullSpec, default identity
    beta : float or "estimate"
        Fourth-moment parameter. ``"estimate"`` derives it from the data
        with :func:`covtest.stats.estimate_beta`.
    kappa : {1, 2}
    alternative : {"greater", "two-sided"}
        Rejection region for the normal reference.
    """
    X = check_data_matrix(X)
    null = NullSpec.identity() if null is None else null
    if alternative not in (GREATER, TWO_SIDED):
        raise ValueError(f"alternative must be {GREATER!r} or {TWO_SIDED!r}")
    p, n = X.shape
    q_n = check_not_unity(p / (n - 1))
    if isinstance(beta, str):
        if beta != ESTIMATE:
            raise ValueError(f"beta must be a number or {ESTIMATE!r}, got {beta!r}")
        beta = estimate_beta(X, null)
        # the moment inequality E xi^4 >= 1 bounds beta from below
        beta = max(beta, -kappa)
    params = RmtParams(q_n, kappa, beta)

    dev = _trace_sq_dev(X, null, n - 1)
    rst_raw = 0.5 * n * dev
    f_qn_g = mp_integral_g(q_n)
    mu = mean_correction(params)
    ups = var_correction(params)
    stat = (dev - p * f_qn_g - mu) / math.sqrt(ups)
    if alternative == GREATER:
        pval = normal_sf(stat)
    else:
        pval = min(1.0, 2.0 * normal_sf(abs(stat)))
    detail = CorrectionDetail(rst_raw, f_qn_g, mu, ups, q_n, params.beta)
    return TestResult("crst", stat, NORMAL, pval, alternative=alternative, detail=detail)


class TestStatistic:
    """Extension point: a named test computed from a p x n sample.

    Subclasses set ``name`` and implement ``compute(X, null)`` returning a
    :class:`TestResult`.
    """

    __test__ = False
    name = "abstract"

    def compute(self, X, null):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


class RaoScore(TestStatistic):
    name = "rst"

    def compute(self, X, null):
        return rst_statistic(X, null)


class CorrectedRaoScore(TestStatistic):
    name = "crst"

    def __init__(self, beta=0.0, kappa=2, alternative=GREATER):
        self.beta = beta
        self.kappa = kappa
        self.alternative = alternative

    def compute(self, X, null):
        return crst_statistic(X, null, self.beta, self.kappa, self.alternative)

    def __repr__(self):
        return (f"CorrectedRaoScore(beta={self.beta!r}, kappa={self.kappa}, "
                f"alternative={self.alternative!r})")
