"""
Confluent hypergeometric and parabolic cylinder functions in the parameter
ranges of the fundamental solutions.

``U(a, b, z)`` and ``D_nu(z)`` for ``nu < 0`` are computed in the log domain from
their Laplace-type integral representations, so values far below the float range
stay usable through ratios. ``M(a, b, z)`` comes from :func:`scipy.special.hyp1f1`.
"""
import logging

import numpy as np
from scipy import special

from .exceptions import SpecialFunctionError


log = logging.getLogger(__name__)


_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(32)

# Integrands are dropped once they fall this far (in log) below their peak.
_LOG_DEPTH = 60.0
_MAX_DOUBLINGS = 64
_BISECTIONS = 80


def _as_array(z):
    return np.atleast_1d(np.asarray(z, dtype=float)).ravel()


def _like(z, values):
    if np.ndim(z) == 0:
        return float(values[0])
    return values.reshape(np.shape(z))


def _peak(derivative, lo, hi):
    """Bisection for the root of a decreasing ``derivative`` on ``[lo, hi]``, elementwise."""
    for _ in range(_BISECTIONS):
        mid = 0.5 * (lo + hi)
        positive = derivative(mid) > 0
        lo = np.where(positive, mid, lo)
        hi = np.where(positive, hi, mid)
    return 0.5 * (lo + hi)


def _log_unimodal_integral(exponent, peak, curvature, name, parameters):
    """
    ``log int exp(exponent(u)) du`` over the real line for an exponent with a
    single peak at ``peak`` (one per row) and curvature ``curvature`` there.

    Panels grow geometrically away from the peak in units of the peak width
    and stop where the exponent has dropped by ``_LOG_DEPTH``.
    """
    width = 1.0 / np.sqrt(curvature)
    top = exponent(peak[:, None])[:, 0]

    reaches = []
    for side in (-1.0, 1.0):
        reach = 4.0 * width
        for _ in range(_MAX_DOUBLINGS):
            short = exponent((peak + side * reach)[:, None])[:, 0] > top - _LOG_DEPTH
            if not np.any(short):
                break
            reach = np.where(short, 2.0 * reach, reach)
        else:
            raise SpecialFunctionError(name, parameters, 'integrand does not decay')
        reaches.append(reach)

    span = max(np.max(r / width) for r in reaches)
    steps = [0.0, 0.25, 0.5, 1.0]
    while steps[-1] < span:
        steps.append(2.0 * steps[-1])
    steps = np.array(steps)

    total = np.zeros_like(peak)
    for side, reach in zip((-1.0, 1.0), reaches):
        edges = np.minimum(width[:, None] * steps[None, :], reach[:, None])
        lo, hi = edges[:, :-1], edges[:, 1:]
        half = 0.5 * (hi - lo)
        offsets = (lo + half)[:, :, None] + half[:, :, None] * _NODES[None, None, :]
        n = len(peak)
        points = (peak[:, None, None] + side * offsets).reshape(n, -1)
        values = np.exp(exponent(points) - top[:, None]).reshape(offsets.shape)
        total += np.sum(half[:, :, None] * values * _WEIGHTS[None, None, :], axis=(1, 2))

    if np.any(~np.isfinite(total)) or np.any(total <= 0):
        raise SpecialFunctionError(name, parameters, 'non-finite integral')
    return top + np.log(total)


def log_kummer_u(a, b, z):
    """
    ``log U(a, b, z)`` for ``a > 0``, ``z > 0``, from
    ``U = Gamma(a)^-1 int_0^inf exp(-z t) t^(a-1) (1 + t)^(b-a-1) dt``
    written in ``u = log t``.
    """
    a, b = float(a), float(b)
    zz = _as_array(z)
    if a <= 0 or np.any(zz <= 0):
        raise SpecialFunctionError('U', (a, b, z), 'needs a > 0 and z > 0')
    c = b - a - 1.0

    def exponent(u, zc=zz[:, None]):
        return a * u + c * np.logaddexp(0.0, u) - zc * np.exp(u)

    def slope(u):
        return a + c * special.expit(u) - zz * np.exp(u)

    if c > 0:
        lo, hi = np.log(a / zz), np.log((a + c) / zz)
    else:
        lo, hi = np.log(a / (abs(c) + zz)), np.log(a / zz)
    peak = _peak(slope, lo, hi)
    s = special.expit(peak)
    curvature = np.maximum(zz * np.exp(peak) - c * s * (1.0 - s), 1e-3 * zz * np.exp(peak))

    values = _log_unimodal_integral(exponent, peak, curvature, 'U', (a, b)) - special.gammaln(a)
    return _like(z, values)


def kummer_u(a, b, z):
    """
    Confluent hypergeometric function of the second kind.

    Examples::

        >>> round(kummer_u(1.0, 2.0, 4.0), 12)
        0.25
    """
    return _like(z, np.exp(_as_array(log_kummer_u(a, b, z))))


def kummer_m(a, b, z):
    """
    Confluent hypergeometric function of the first kind, ``M(a, b, 0) = 1``.
    """
    values = special.hyp1f1(a, b, _as_array(z))
    if np.any(~np.isfinite(values)):
        raise SpecialFunctionError('M', (a, b, z), 'hyp1f1 overflow')
    return _like(z, values)


def log_kummer_m(a, b, z):
    values = _as_array(kummer_m(a, b, z))
    if np.any(values <= 0):
        raise SpecialFunctionError('M', (a, b, z), 'non-positive value')
    return _like(z, np.log(values))


def log_parabolic_cylinder_d(nu, z):
    """
    ``log D_nu(z)`` for ``nu < 0`` from
    ``D_nu(z) = exp(-z^2/4) Gamma(n)^-1 int_0^inf t^(n-1) exp(-z t - t^2/2) dt``, ``n = -nu``.
    """
    nu = float(nu)
    zz = _as_array(z)
    if nu >= 0:
        values = _as_array(parabolic_cylinder_d(nu, zz))
        if np.any(values <= 0):
            raise SpecialFunctionError('D', (nu, z), 'log of a non-positive value')
        return _like(z, np.log(values))
    n = -nu

    def exponent(u, zc=zz[:, None]):
        t = np.exp(u)
        return n * u - zc * t - 0.5 * t * t

    root = np.sqrt(zz * zz + 4.0 * n)
    v = np.where(zz > 0, 2.0 * n / (zz + root), 0.5 * (root - zz))
    peak = np.log(v)
    curvature = n + v * v

    values = -0.25 * zz * zz - special.gammaln(n) + _log_unimodal_integral(exponent, peak, curvature, 'D', (nu,))
    return _like(z, values)


def parabolic_cylinder_d(nu, z):
    """
    Parabolic cylinder function ``D_nu(z)``.

    Examples::

        >>> parabolic_cylinder_d(0.0, 2.0) == np.exp(-1.0)
        True
    """
    nu = float(nu)
    zz = _as_array(z)
    if nu == 0:
        return _like(z, np.exp(-0.25 * zz * zz))
    if nu > 0:
        values, _ = special.pbdv(nu, zz)
        if np.any(~np.isfinite(values)):
            raise SpecialFunctionError('D', (nu, z), 'pbdv failed')
        return _like(z, values)
    return _like(z, np.exp(_as_array(log_parabolic_cylinder_d(nu, zz))))
