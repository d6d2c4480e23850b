"""Null hypotheses about the population covariance matrix."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import check_cov_matrix

IDENTITY = "identity"
SPHERICITY = "sphericity"
GENERAL = "general"
KINDS = (IDENTITY, SPHERICITY, GENERAL)


@dataclass(frozen=True, eq=False)
class NullSpec:
    """Hypothesized covariance structure.

    ``kind`` is one of ``"identity"`` (Sigma = I), ``"sphericity"``
    (Sigma = gamma * I, gamma unknown) or ``"general"`` (Sigma = sigma0).
    """

    kind: str = IDENTITY
    sigma0: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown null kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == GENERAL:
            if self.sigma0 is None:
                raise ValueError("a general null requires sigma0")
            S, _ = check_cov_matrix(self.sigma0)
            object.__setattr__(self, "sigma0", S)
        elif self.sigma0 is not None:
            raise ValueError(f"sigma0 is only accepted for a general null, not {self.kind!r}")

    @classmethod
    def identity(cls):
        return cls(IDENTITY)

    @classmethod
    def sphericity(cls):
        return cls(SPHERICITY)

    @classmethod
    def general(cls, sigma0):
        return cls(GENERAL, np.asarray(sigma0, dtype=float))

    def cholesky(self, p):
        """Lower Cholesky factor of sigma0, checked against dimension ``p``."""
        _, L = check_cov_matrix(self.sigma0, p=p)
        return L

    def describe(self):
        if self.kind == GENERAL:
            return f"general(p={self.sigma0.shape[0]})"
        return self.kind
