"""Mean and variance corrections for the linear spectral statistic of
g(x) = (x - 1)^2, plus contour-integral oracles that recompute them.

The oracles work in the plane of the companion Stieltjes transform m,
where z(m) = -1/m + q/(1 + m). Every integrand is rational in m with poles
only at m = 0 and m = -1. The positively oriented z-contour maps to a
counter-clockwise circle around -1 when q <= 1 and to a clockwise circle
around 0 when q > 1; the oracles integrate over exactly that circle.
"""
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, DomainError, QuadratureError
from .mp_law import check_not_unity, mp_edges, periodic_trapezoid

DEFAULT_TOL = 1e-10
CONTOUR_POINTS = 2048
MAX_CONTOUR_POINTS = 1 << 16
MAX_DOUBLE_POINTS = 4096
POLE_MARGIN = 0.3
COLLISION_GAP = 1e-3


@dataclass(frozen=True)
class RmtParams:
    """(q, kappa, beta): dimension ratio, 2 for real / 1 for complex data,
    and the fourth-moment parameter beta = E xi^4 - kappa - 1."""

    q: float
    kappa: int = 2
    beta: float = 0.0

    def __post_init__(self):
        q = float(self.q)
        if not math.isfinite(q) or q <= 0:
            raise DomainError(f"q must be positive, got {self.q}")
        if self.kappa not in (1, 2):
            raise DomainError(f"kappa must be 1 (complex) or 2 (real), got {self.kappa}")
        beta = float(self.beta)
        if not math.isfinite(beta) or beta < -self.kappa:
            raise DomainError(f"beta must be >= -kappa = {-self.kappa}, got {self.beta}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "beta", beta)


def mean_correction(params):
    """mu(g) = (kappa - 1) q + beta q."""
    return (params.kappa - 1) * params.q + params.beta * params.q


def var_correction(params):
    """upsilon(g) = 2 kappa q^2 (1 + 2q) + 4 beta q^3."""
    q = params.q
    return 2.0 * params.kappa * q * q * (1.0 + 2.0 * q) + 4.0 * params.beta * q**3


def stieltjes_z_of_m(m, q):
    """Inverse of the companion Stieltjes transform of the MP law:
    z = -1/m + q/(1 + m)."""
    m = np.asarray(m, dtype=complex)
    if np.any(m == 0) or np.any(m == -1):
        raise DomainError("m = 0 and m = -1 are poles of z(m)")
    z = -1.0 / m + q / (1.0 + m)
    return complex(z) if z.ndim == 0 else z


def _dz_dm(m, q):
    return 1.0 / m**2 - q / (1.0 + m) ** 2


def _g(z):
    return (z - 1.0) ** 2


def contour(q, radius=0.5):
    """Circle (center, radius, orientation) enclosing the single relevant pole.

    orientation is +1 for counter-clockwise, -1 for clockwise.
    """
    if radius <= 0 or 1.0 - radius < POLE_MARGIN:
        raise ConfigError(
            f"radius {radius} leaves less than {POLE_MARGIN} between the contour "
            "and the excluded pole"
        )
    if q <= 1.0:
        return -1.0, radius, 1
    return 0.0, radius, -1


def _circle(center, radius, orientation, n):
    t = 2.0 * math.pi * np.arange(n) / n
    e = np.exp(1j * orientation * t)
    m = center + radius * e
    # dm = i * orientation * radius * e dt, dt = 2 pi / n
    dm = 1j * orientation * radius * e * (2.0 * math.pi / n)
    return m, dm


def contour_integral(h, center, radius, orientation=1, tol=DEFAULT_TOL,
                     n=CONTOUR_POINTS, max_n=MAX_CONTOUR_POINTS):
    """Trapezoid rule for the closed integral of ``h(m) dm`` over a circle,
    doubling the point count until successive values agree to ``tol``."""
    m, dm = _circle(center, radius, orientation, n)
    value = complex(np.sum(h(m) * dm))
    while n < max_n:
        n *= 2
        m, dm = _circle(center, radius, orientation, n)
        refined = complex(np.sum(h(m) * dm))
        if abs(refined - value) < tol:
            return refined
        value = refined
    raise QuadratureError(f"contour integral did not converge to tol={tol:g} with {max_n} points")


def double_contour_integral(h, center, inner_radius, outer_radius, orientation=1,
                            tol=DEFAULT_TOL, n=CONTOUR_POINTS // 8, max_n=MAX_DOUBLE_POINTS):
    """Closed integral of ``h(m1, m2) dm1 dm2``, m1 on the inner circle and
    m2 on the outer one, both concentric around ``center``."""
    if outer_radius - inner_radius < COLLISION_GAP:
        raise ConfigError(
            f"inner radius {inner_radius} must be below outer radius {outer_radius} "
            f"by at least {COLLISION_GAP}"
        )

    def once(k):
        m1, dm1 = _circle(center, inner_radius, orientation, k)
        m2, dm2 = _circle(center, outer_radius, orientation, k)
        return complex(dm1 @ h(m1[:, None], m2[None, :]) @ dm2)

    value = once(n)
    while n < max_n:
        n *= 2
        refined = once(n)
        if abs(refined - value) < tol:
            return refined
        value = refined
    raise QuadratureError(f"double contour integral did not converge to tol={tol:g}")


def mean_components_numeric(params, tol=DEFAULT_TOL, radius=0.5):
    """Return (mu1, mu2) computed by quadrature."""
    q = check_not_unity(params.q)
    kappa, beta = params.kappa, params.beta

    # mu1: real-axis form, substituted x = 1 + q - 2 sqrt(q) cos(theta)
    a, b = mp_edges(q)
    sq = math.sqrt(q)
    integral = periodic_trapezoid(
        lambda t: float(np.sum(_g(1.0 + q - 2.0 * sq * np.cos(t)))), 0.0, math.pi, tol
    )
    mu1 = (kappa - 1) * ((_g(a) + _g(b)) / 4.0 - integral / (2.0 * math.pi))

    # mu2: Lemma integrand in m, with dz = z'(m) dm and g evaluated at z(m)
    def integrand(m):
        z = stieltjes_z_of_m(m, q)
        core = m**3 / ((1.0 + m) * ((1.0 - q) * m**2 + 2.0 * m + 1.0))
        return _g(z) * core * _dz_dm(m, q)

    mu2 = 0.0
    if beta != 0.0:
        center, r, orient = contour(q, radius)
        loop = contour_integral(integrand, center, r, orient, tol)
        mu2 = float((-beta * q / (2j * math.pi) * loop).real)
    return float(mu1), mu2


def mean_correction_numeric(params, tol=DEFAULT_TOL, radius=0.5):
    """mu(g) recomputed from the Lemma's mean integrals."""
    mu1, mu2 = mean_components_numeric(params, tol, radius)
    return mu1 + mu2


def variance_component_numeric(f1, f2, params, tol=DEFAULT_TOL, inner_radius=0.35,
                               outer_radius=0.6):
    """-kappa/(4 pi^2) times the double contour integral of
    f1(z1) f2(z2) / (m1 - m2)^2 dm1 dm2."""
    q = check_not_unity(params.q)
    center, _, orient = contour(q, outer_radius)

    def integrand(m1, m2):
        z1 = -1.0 / m1 + q / (1.0 + m1)
        z2 = -1.0 / m2 + q / (1.0 + m2)
        return f1(z1) * f2(z2) / (m1 - m2) ** 2

    loop = double_contour_integral(integrand, center, inner_radius, outer_radius, orient, tol)
    return float((-params.kappa / (4.0 * math.pi**2) * loop).real)


def var_components_numeric(params, tol=DEFAULT_TOL, inner_radius=0.35, outer_radius=0.6):
    """Return (upsilon1, upsilon2) computed by contour quadrature."""
    q = check_not_unity(params.q)
    ups1 = variance_component_numeric(_g, _g, params, tol, inner_radius, outer_radius)

    ups2 = 0.0
    if params.beta != 0.0:
        center, r, orient = contour(q, 0.5)
        single = contour_integral(
            lambda m: _g(stieltjes_z_of_m(m, q)) / (1.0 + m) ** 2, center, r, orient, tol
        )
        ups2 = float((-params.beta * q / (4.0 * math.pi**2) * single**2).real)
    return ups1, ups2


def var_correction_numeric(params, tol=DEFAULT_TOL, inner_radius=0.35, outer_radius=0.6):
    """upsilon(g) recomputed from the Lemma's covariance integrals."""
    ups1, ups2 = var_components_numeric(params, tol, inner_radius, outer_radius)
    return ups1 + ups2
