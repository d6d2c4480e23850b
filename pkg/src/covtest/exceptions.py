"""Exception types raised by covtest."""


class CovTestError(Exception):
    """Base class for all covtest errors."""


class DomainError(CovTestError, ValueError):
    """An input lies outside the domain where a quantity is defined."""


class RatioAtUnityError(DomainError):
    """The dimension ratio q_n equals 1, where the corrected test is undefined."""


class QuadratureError(CovTestError, ArithmeticError):
    """A numerical integral failed to converge within the refinement cap."""


class ConfigError(CovTestError, ValueError):
    """Inconsistent numerical configuration (e.g. overlapping contours)."""
