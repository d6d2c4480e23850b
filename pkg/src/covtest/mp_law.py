"""Marchenko-Pastur law: density, the closed-form integral of (x - 1)^2,
and a quadrature oracle for integrals against the law.

Quadrature uses the substitution x = 1 + q - 2 sqrt(q) cos(theta),
0 <= theta <= pi, under which the density element becomes
(2 / pi) sin^2(theta) / x dtheta: a smooth periodic integrand, so the
trapezoid rule converges geometrically.
"""
import math

import numpy as np

from ._validation import UNITY_ATOL, check_ratio
from .exceptions import DomainError, QuadratureError, RatioAtUnityError

DEFAULT_TOL = 1e-9
MAX_HALVINGS = 22
_MIN_INTERVALS = 64
_CHUNK = 1 << 20


def mp_edges(q):
    """Support edges ((1 - sqrt q)^2, (1 + sqrt q)^2) of the continuous part."""
    q = check_ratio(q)
    r = math.sqrt(q)
    return (1.0 - r) ** 2, (1.0 + r) ** 2


def mp_point_mass(q):
    """Mass at the origin: 1 - 1/q when q > 1, else 0."""
    q = check_ratio(q)
    return max(0.0, 1.0 - 1.0 / q)


def mp_density(x, q):
    """Density of the continuous part of the MP law with ratio ``q``.

    Zero outside [a, b]; the atom at the origin is reported by
    :func:`mp_point_mass`.
    """
    a, b = mp_edges(q)
    x = np.asarray(x, dtype=float)
    inside = (x >= a) & (x <= b) & (x > 0)
    xs = np.where(inside, x, 1.0)
    dens = np.sqrt(np.clip((b - xs) * (xs - a), 0.0, None)) / (2.0 * math.pi * xs * q)
    out = np.where(inside, dens, 0.0)
    return float(out) if out.ndim == 0 else out


def check_not_unity(q, atol=UNITY_ATOL):
    q = check_ratio(q)
    if abs(q - 1.0) <= atol:
        raise RatioAtUnityError(
            f"dimension ratio q={q!r} is within {atol:g} of 1; the corrected "
            "statistic is undefined at q_n = 1"
        )
    return q


def mp_integral_g(q):
    """Integral of g(x) = (x - 1)^2 against the MP law, atom included.

    The continuous part contributes q (q < 1) or q - 1 + 1/q (q > 1); the
    atom at zero adds (1 - 1/q) * g(0) for q > 1, so the total is q.
    """
    return check_not_unity(q)


def _eval(f, x):
    y = f(x)
    y = np.asarray(y, dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape) if y.ndim == 0 else np.vectorize(f, otypes=[float])(x)
    return y


def _theta_sum(f, q, theta):
    sq = math.sqrt(q)
    lower = (1.0 - sq) ** 2
    total = 0.0
    for start in range(0, theta.size, _CHUNK):
        t = theta[start:start + _CHUNK]
        s2 = np.sin(0.5 * t) ** 2
        c2 = np.cos(0.5 * t) ** 2
        # x = 1 + q - 2 sqrt(q) cos(t), free of cancellation near the lower edge
        x = lower + 4.0 * sq * s2
        # weight sin^2(t) / x in half-angle form; at q = 1 it reduces to c2
        w = 4.0 * s2 * c2 / x if lower > 0 else c2 / sq
        total += float(np.dot(_eval(f, x), w))
    return total


def periodic_trapezoid(h, a, b, tol, max_halvings=MAX_HALVINGS, min_intervals=_MIN_INTERVALS):
    """Trapezoid rule on [a, b] refined by halving until successive estimates
    differ by less than ``tol``.

    ``h(t)`` must return the *sum* of the integrand over the array ``t``.
    Endpoint values are taken as h(a) and h(b) halves.
    """
    n = min_intervals
    step = (b - a) / n
    ends = h(np.array([a])) + h(np.array([b]))
    interior = h(a + step * np.arange(1, n))
    estimate = step * (0.5 * ends + interior)
    for _ in range(max_halvings):
        mids = h(a + step * (np.arange(n) + 0.5))
        interior += mids
        n *= 2
        step *= 0.5
        refined = step * (0.5 * ends + interior)
        change = abs(refined - estimate)
        if change < tol:
            return refined
        estimate = refined
    raise QuadratureError(
        f"trapezoid rule did not reach tol={tol:g} after {max_halvings} halvings "
        f"(last change {change:.3g})"
    )


def mp_integral_numeric(f, q, tol=DEFAULT_TOL, max_halvings=MAX_HALVINGS):
    """Integrate ``f`` against the MP law of ratio ``q`` numerically.

    ``f`` should accept numpy arrays; scalar-only callables are vectorized.
    The atom at zero contributes f(0) * (1 - 1/q) when q > 1.
    """
    q = check_ratio(q)
    body = periodic_trapezoid(lambda t: _theta_sum(f, q, t), 0.0, math.pi, tol, max_halvings)
    total = (2.0 / math.pi) * body
    mass = mp_point_mass(q)
    if mass > 0:
        total += float(_eval(f, np.zeros(1))[0]) * mass
    return total


def helper_integral_cos(d0):
    """Integral of 1 / (cos(theta) + d0) over [0, 2 pi].

    Equals -2 pi / sqrt(d0^2 - 1) for d0 < -1 (and +2 pi / sqrt(d0^2 - 1)
    for d0 > 1).
    """
    d0 = float(d0)
    if not math.isfinite(d0) or abs(d0) <= 1.0:
        raise DomainError(f"|d0| must exceed 1 (pole on the integration path), got {d0}")
    return math.copysign(2.0 * math.pi, d0) / math.sqrt(d0 * d0 - 1.0)


def ratio_to_d0(q):
    """Shift d0 = -(1 + q) / (2 sqrt q) appearing in the theta-substituted integrals."""
    q = check_ratio(q)
    return -(1.0 + q) / (2.0 * math.sqrt(q))
