"""
Adaptive Gauss-Kronrod integration on finite intervals and on intervals with one
infinite endpoint.

Integrands are called with numpy arrays of nodes (all nodes of all active panels
at once) and must return an array of the same shape.
"""
import logging

import numpy as np

from .exceptions import QuadratureError, DivergenceSuspected, ModelEvaluationError, AssumptionViolation


log = logging.getLogger(__name__)


# Kronrod 15-point abscissae on [0, 1]; the Gauss 7-point rule uses every other one.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full symmetric node set on [-1, 1] and matching weights.
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_GAUSS_WEIGHTS = np.zeros(15)
_GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
_GAUSS_WEIGHTS[7] = _WG[3]
_GAUSS_WEIGHTS[[9, 11, 13]] = _WG[:3][::-1]

_EPS = np.finfo(float).eps

#: Maximum number of bisections of any one panel.
MAX_DEPTH = 60

#: Maximum number of doublings when truncating an infinite range.
MAX_DOUBLINGS = 60


class Integrand(object):
    """
    A vectorized integrand ``z -> f(z)`` with flags for endpoint singularities.

    A flagged endpoint is approached through geometrically shrinking panels and is
    never evaluated.
    """

    def __init__(self, evaluator, singular_lower=False, singular_upper=False):
        self.evaluator = evaluator
        self.singular_lower = singular_lower
        self.singular_upper = singular_upper

    def __call__(self, z):
        values = np.asarray(self.evaluator(z), dtype=float)
        if values.shape != np.shape(z):
            values = np.broadcast_to(values, np.shape(z))
        if not np.all(np.isfinite(values)):
            bad = np.asarray(z)[~np.isfinite(values)]
            raise ModelEvaluationError(float(bad.flat[0]), 'non-finite integrand')
        return values

    def reflected(self):
        """
        Returns the integrand ``z -> f(-z)``, with endpoint flags swapped.
        """
        return Integrand(lambda z: self.evaluator(-z), singular_lower=self.singular_upper,
                         singular_upper=self.singular_lower)


def _as_integrand(f):
    if isinstance(f, Integrand):
        return f
    return Integrand(f)


def _gauss_kronrod(f, lo, hi):
    """
    Apply the 15-point Kronrod rule to every panel ``[lo[i], hi[i]]``.

    Returns:
        (integral, error, absolute integral) arrays, one entry per panel.
    """
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = center[:, None] + half[:, None] * _NODES[None, :]
    values = f(nodes)

    kronrod = half * (values @ _KRONROD_WEIGHTS)
    gauss = half * (values @ _GAUSS_WEIGHTS)
    resabs = np.abs(half) * (np.abs(values) @ _KRONROD_WEIGHTS)
    mean = kronrod / np.where(half != 0, 2 * half, 1.0)
    resasc = np.abs(half) * (np.abs(values - mean[:, None]) @ _KRONROD_WEIGHTS)

    # Error scaling as in QUADPACK's qk15.
    error = np.abs(kronrod - gauss)
    scaled = np.where(
        (resasc != 0) & (error != 0),
        resasc * np.minimum(1.0, (200 * error / np.where(resasc != 0, resasc, 1.0)) ** 1.5),
        error,
    )
    floor = 50 * _EPS * resabs
    scaled = np.where(resabs > np.finfo(float).tiny / (50 * _EPS), np.maximum(scaled, floor), scaled)
    return kronrod, scaled, resabs


def _adaptive(f, a, b, tol, max_panels=4000):
    """
    Globally adaptive bisection. Accepts when the summed error estimate is within
    ``tol`` relative to the integral, or to a small fraction of the integral of ``|f|``
    when the integral itself cancels.
    """
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    depth = np.zeros(1, dtype=int)
    value, error, absolute = _gauss_kronrod(f, lo, hi)

    while True:
        total = value.sum()
        total_error = error.sum()
        target = tol * max(abs(total), 1e-3 * absolute.sum())
        if total_error <= target:
            return total, total_error

        threshold = target / len(value)
        refine = error > threshold
        refine[np.argmax(error)] = True

        if np.any(depth[refine] >= MAX_DEPTH) or len(value) + refine.sum() > max_panels:
            raise QuadratureError((a, b), total, total_error)

        mid = 0.5 * (lo[refine] + hi[refine])
        new_lo = np.concatenate([lo[refine], mid])
        new_hi = np.concatenate([mid, hi[refine]])
        new_depth = np.concatenate([depth[refine], depth[refine]]) + 1
        new_value, new_error, new_absolute = _gauss_kronrod(f, new_lo, new_hi)

        keep = ~refine
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        depth = np.concatenate([depth[keep], new_depth])
        value = np.concatenate([value[keep], new_value])
        error = np.concatenate([error[keep], new_error])
        absolute = np.concatenate([absolute[keep], new_absolute])


def _toward_endpoint(f, anchor, width, tol, direction):
    """
    Integrate over ``(anchor, anchor + direction * width]`` with panels
    ``[anchor + 2^-k width, anchor + 2^-k+1 width]`` shrinking toward ``anchor``.

    Once consecutive panels shrink by a settled ratio, the remainder next to ``anchor``
    is summed as a geometric series; the drift of the ratio bounds the error of that sum.
    """
    accumulated = 0.0
    previous = None
    previous_ratio = None

    for k in range(1, MAX_DEPTH + 1):
        near = anchor + direction * width * 2.0 ** -k
        far = anchor + direction * width * 2.0 ** (-k + 1)
        a, b = (near, far) if direction > 0 else (far, near)
        panel, _ = _adaptive(f, a, b, tol)
        accumulated += panel

        if abs(panel) <= 1e-2 * tol * abs(accumulated) or (panel == 0 and accumulated == 0):
            return accumulated

        if previous:
            ratio = panel / previous
            if previous_ratio is not None and 0 <= ratio < 1:
                remainder = panel * ratio / (1 - ratio)
                drift = abs(remainder) * abs(ratio - previous_ratio) / (1 - ratio)
                if drift <= tol * abs(accumulated + remainder):
                    return accumulated + remainder
            previous_ratio = ratio
        previous = panel

    raise QuadratureError((anchor, anchor + direction * width), accumulated)


def integrate(f, a, b, tol=1e-11):
    """
    Integrate ``f`` over the finite interval ``[a, b]``.

    Args:
        f: :class:`Integrand` or vectorized callable.
        a, b: finite limits; ``b < a`` flips the sign.
        tol: absolute-or-relative tolerance.

    Raises:
        QuadratureError: no convergence after the maximum refinement.

    Examples::

        >>> integrate(lambda z: 2.0, 0.0, 3.0)
        6.0
        >>> round(integrate(Integrand(lambda z: z ** -0.5, singular_lower=True), 0.0, 1.0), 10)
        2.0
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError('integrate() needs finite limits, got [{!r}, {!r}]'.format(a, b))
    if a == b:
        return 0.0
    if b < a:
        return -integrate(f, b, a, tol=tol)

    f = _as_integrand(f)
    width = b - a

    if f.singular_lower and f.singular_upper:
        mid = a + 0.5 * width
        return (
            _toward_endpoint(f, a, mid - a, tol, +1)
            + _toward_endpoint(f, b, b - mid, tol, -1)
        )
    if f.singular_lower:
        return _toward_endpoint(f, a, width, tol, +1)
    if f.singular_upper:
        return _toward_endpoint(f, b, width, tol, -1)

    value, _ = _adaptive(f, a, b, tol)
    return value


class TailEstimate(float):
    """
    A float carrying the size of the last truncation panel as ``tail_bound``.
    """

    def __new__(cls, value, tail_bound, panels):
        obj = super(TailEstimate, cls).__new__(cls, value)
        obj.tail_bound = tail_bound
        obj.panels = panels
        return obj

    @property
    def value(self):
        return float(self)


def integrate_upper_tail(f, a, tol=1e-11, tail_tol=1e-13, decay_hint=None):
    """
    Integrate ``f`` over ``[a, inf)`` by progressive truncation.

    Panels ``[a + (2^j - 1) d, a + (2^(j+1) - 1) d]`` are added until two consecutive
    panels contribute at most ``tail_tol`` relative to the summed panel magnitudes.

    Args:
        decay_hint: optional decay rate of ``f``; the first panel width is ``1 / decay_hint``.

    Returns:
        TailEstimate: the value with the achieved ``tail_bound``.

    Raises:
        DivergenceSuspected: no decay after ``MAX_DOUBLINGS`` panels.
    """
    f = _as_integrand(f)
    width = 1.0 / decay_hint if decay_hint else max(1.0, 0.5 * abs(a))
    accumulated = 0.0
    magnitude = 0.0
    quiet = 0
    start = a

    for j in range(MAX_DOUBLINGS):
        end = start + width
        panel = integrate(Integrand(f.evaluator, singular_lower=(j == 0 and f.singular_lower)), start, end, tol=tol)
        accumulated += panel
        magnitude += abs(panel)

        if abs(panel) <= tail_tol * magnitude or magnitude == 0:
            quiet += 1
            if quiet >= 2:
                log.debug('Upper tail from %r converged after %d panels', a, j + 1)
                return TailEstimate(accumulated, abs(panel), j + 1)
        else:
            quiet = 0

        start = end
        width *= 2

    raise DivergenceSuspected(a, accumulated, panel)


def integrate_lower_tail(f, b, tol=1e-11, tail_tol=1e-13, decay_hint=None):
    """
    Integrate ``f`` over ``(-inf, b]``; the mirror image of :func:`integrate_upper_tail`.
    """
    f = _as_integrand(f)
    return integrate_upper_tail(f.reflected(), -b, tol=tol, tail_tol=tail_tol, decay_hint=decay_hint)


def integrate_from_lower(f, lower, x, tol=1e-11, tail_tol=1e-13):
    """
    Integrate ``f`` from the lower boundary ``lower`` (``0`` or ``-inf``) to ``x``.
    A finite lower boundary is treated as a possible singularity.
    """
    if np.isneginf(lower):
        return float(integrate_lower_tail(f, x, tol=tol, tail_tol=tail_tol))
    f = _as_integrand(f)
    return integrate(Integrand(f.evaluator, singular_lower=True), lower, x, tol=tol)


def m_measure(spec, x):
    """
    Speed measure ``m(l, x)`` of ``(l, x]``.

    Uses the model's closed form when it has one and quadrature otherwise.

    Raises:
        AssumptionViolation: the measure of a neighbourhood of ``l`` is infinite.
    """
    from .diffusions import speed_measure
    return speed_measure(spec.model, x, tol=spec.tolerances.quad_tol, tail_tol=spec.tolerances.tail_tol)


def numeric_speed_measure(model, x, tol=1e-11, tail_tol=1e-13):
    from .diffusions import speed_density
    try:
        return integrate_from_lower(lambda z: speed_density(model, z), model.lower, x, tol=tol, tail_tol=tail_tol)
    except DivergenceSuspected as e:
        raise AssumptionViolation('finite speed measure', 'm(l, {!r}) diverges ({})'.format(x, e))
    except QuadratureError as e:
        raise AssumptionViolation('finite speed measure', 'm(l, {!r}) did not converge ({})'.format(x, e))
