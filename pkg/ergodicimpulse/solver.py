"""
The optimal threshold: auxiliary functions ``L`` and ``H``, the residual ``P`` of the
optimality equation, the bracket ``(x_tilde, x_hat)``, the threshold ``y*``, the
average cost ``beta`` and sweeps over the signal rate.

Functions take scalar states. Internally ``L`` and ``P`` are divided by
``phi(x)`` (which only rescales them by a positive factor) so that no value of
``phi`` itself is ever formed.
"""
import collections
import logging
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.optimize import brentq

from .diffusions import pi_mu, sample_grid, scale_density, speed_density
from .exceptions import BracketingError, InvalidValue, NumericalError, SolverError
from .fundamental import build_pair
from .quadrature import integrate_from_lower, integrate_upper_tail, m_measure


log = logging.getLogger(__name__)


MAX_EXPANSIONS = 60


def _lower_integral(spec, f, x):
    tol = spec.tolerances
    return float(integrate_from_lower(f, spec.model.lower, x, tol=tol.quad_tol, tail_tol=tol.tail_tol))


def _upper_integral(spec, pair, f, x):
    tol = spec.tolerances
    rate = abs(pair.dlog_phi(x))
    hint = max(rate, 1.0 / (1.0 + abs(x)))
    return float(integrate_upper_tail(f, x, tol=tol.quad_tol, tail_tol=tol.tail_tol, decay_hint=hint))


def _weighted_above(spec, pair, g, x):
    """``int_x^inf g(z) phi(z) m'(z) dz / phi(x)``."""
    return _upper_integral(spec, pair, lambda z: g(z) * pair.phi_ratio(z, x) * speed_density(spec.model, z), x)


def _scaled_L(spec, pair, x):
    level = pi_mu(spec, x)
    return spec.intensity * _weighted_above(spec, pair, lambda z: pi_mu(spec, z) - level, x)


def _scaled_P(spec, pair, x):
    return scale_density(spec.model, x) * m_measure(spec, x) * _scaled_L(spec, pair, x) + pair.dlog_phi(x) * H(spec, x)


def L(spec, pair, x):
    """
    ``L(x) = lambda int_x^inf pi_mu phi m' + phi'(x) pi_mu(x) / S'(x)``, computed as
    ``lambda int_x^inf (pi_mu(z) - pi_mu(x)) phi(z) m'(z) dz``.
    """
    return pair.phi(x) * _scaled_L(spec, pair, x)


def H(spec, x):
    """
    ``H(x) = int_l^x pi_mu m' - pi_mu(x) m(l, x)``, computed as ``int_l^x (pi_mu(z) - pi_mu(x)) m'(z) dz``.
    """
    level = pi_mu(spec, x)
    return _lower_integral(spec, lambda z: (pi_mu(spec, z) - level) * speed_density(spec.model, z), x)


def residual_P(spec, pair, x):
    """
    ``P(x) = S'(x) m(l, x) L(x) + phi'(x) H(x)``; negative below ``y*``, positive above.
    """
    return pair.phi(x) * _scaled_P(spec, pair, x)


def g_hat(spec, pair, x):
    """
    ``L(x) / phi'(x) + H(x) / (S'(x) m(l, x))``, the optimality residual divided by
    ``phi' S' m``. At the singular threshold it vanishes as the signal rate grows.
    """
    return _scaled_L(spec, pair, x) / pair.dlog_phi(x) + H(spec, x) / (scale_density(spec.model, x) * m_measure(spec, x))


def beta_below(spec, y):
    """Average of ``pi_mu`` over ``(l, y]`` under the speed measure."""
    total = _lower_integral(spec, lambda z: pi_mu(spec, z) * speed_density(spec.model, z), y)
    return total / m_measure(spec, y)


#: ``I(x)`` of the monotonicity lemma is the same average.
i_function = beta_below


def beta_above(spec, pair, y):
    """Average of ``pi_mu`` over ``[y, inf)`` under ``phi m'``."""
    numerator = _weighted_above(spec, pair, lambda z: pi_mu(spec, z), y)
    denominator = _weighted_above(spec, pair, np.ones_like, y)
    return numerator / denominator


def _expand(function, name, start, points):
    """
    Evaluates ``function`` at ``start`` and then along ``points`` until the sign flips.

    Returns:
        ``(inner, outer)`` with a sign change between them.
    """
    inner = start
    value = function(start)
    samples = [(start, value)]
    for x in points:
        outer_value = function(x)
        samples.append((x, outer_value))
        log.debug('Bracketing %s: %s(%r) = %r', name, name, x, outer_value)
        if np.sign(outer_value) != np.sign(value):
            return inner, x
        inner, value = x, outer_value
    raise BracketingError(name, samples)


def find_x_hat(spec):
    """
    The root of ``H``, to the right of ``x*``. It is also the optimal threshold of
    the singular (always-controllable) problem.
    """
    x_star = spec.x_star
    step = 0.25 * max(abs(x_star), 1.0)
    points = (x_star + step * 2.0 ** k for k in range(MAX_EXPANSIONS))
    inner, outer = _expand(lambda x: H(spec, x), 'H', x_star, points)
    return brentq(lambda x: H(spec, x), inner, outer, xtol=spec.tolerances.root_tol)


def find_x_tilde(spec, pair):
    """The root of ``L``, to the left of ``x*``."""
    x_star = spec.x_star
    if spec.model.on_half_line:
        points = (x_star * 2.0 ** -k for k in range(1, MAX_EXPANSIONS))
    else:
        step = 0.25 * max(abs(x_star), 1.0)
        points = (x_star - step * 2.0 ** k for k in range(MAX_EXPANSIONS))
    function = lambda x: _scaled_L(spec, pair, x)  # noqa: E731
    inner, outer = _expand(function, 'L', x_star, points)
    return brentq(function, outer, inner, xtol=spec.tolerances.root_tol)


class SolveResult(collections.namedtuple('SolveResult', [
    'intensity', 'x_tilde', 'x_hat', 'y_star', 'beta_below', 'beta_above', 'beta',
    'residual_P', 'bracket_ok', 'singular_threshold', 'diagnostics',
])):
    """
    Outcome of :func:`solve_threshold`. ``residual_P`` is normalized by
    ``S'(y*) m(l, y*) |L(x_hat)|``.
    """

    __slots__ = ()

    def as_dict(self):
        payload = collections.OrderedDict()
        for name, value in zip(self._fields, self):
            if isinstance(value, (float, np.floating)):
                value = float(value)
            elif isinstance(value, dict):
                value = collections.OrderedDict(value)
            payload[name] = value
        return payload


def solve_threshold(spec, pair=None, x_hat=None):
    """
    Solves ``P(y) = 0`` on ``[x_tilde + eps, x_hat - eps]`` with ``eps = 10 root_tol``.

    Args:
        pair: fundamental pair for ``spec``; built when omitted.
        x_hat: precomputed root of ``H`` (it does not depend on the signal rate).

    Raises:
        SolverError: ``P`` has the same sign at both ends of the bracket.
    """
    pair = pair or build_pair(spec)
    tol = spec.tolerances
    x_hat = find_x_hat(spec) if x_hat is None else x_hat
    x_tilde = find_x_tilde(spec, pair)

    eps = 10 * tol.root_tol
    lo, hi = x_tilde + eps, x_hat - eps
    diagnostics = collections.OrderedDict([('x_star', spec.x_star), ('provenance', pair.provenance)])
    if lo >= hi:
        raise SolverError('empty bracket for the threshold', dict(diagnostics, x_tilde=x_tilde, x_hat=x_hat))

    residual = lambda x: _scaled_P(spec, pair, x)  # noqa: E731
    p_lo, p_hi = residual(lo), residual(hi)
    if np.sign(p_lo) == np.sign(p_hi):
        raise SolverError('P has the same sign at both ends of the bracket', dict(
            diagnostics, x_tilde=x_tilde, x_hat=x_hat, P_lo=p_lo, P_hi=p_hi,
        ))

    y_star, info = brentq(residual, lo, hi, xtol=tol.root_tol, full_output=True)
    below = beta_below(spec, y_star)
    above = beta_above(spec, pair, y_star)
    beta = 0.5 * (below + above)

    scale = scale_density(spec.model, y_star) * m_measure(spec, y_star) * abs(_scaled_L(spec, pair, x_hat))
    normalized = residual(y_star) * float(pair.phi_ratio(y_star, x_hat)) / scale

    gap = abs(below - above)
    consistent = gap <= tol.beta_consistency_tol * abs(beta)
    if not consistent:
        log.warning('beta below (%r) and above (%r) disagree at y* = %r', below, above, y_star)

    diagnostics.update([
        ('iterations', info.iterations),
        ('function_calls', info.function_calls),
        ('root_tol', tol.root_tol),
        ('quad_tol', tol.quad_tol),
        ('tail_tol', tol.tail_tol),
        ('beta_gap', gap),
        ('beta_consistent', consistent),
    ])
    log.debug('lambda=%r: y*=%r after %d iterations', spec.intensity, y_star, info.iterations)

    return SolveResult(
        intensity=spec.intensity,
        x_tilde=x_tilde,
        x_hat=x_hat,
        y_star=y_star,
        beta_below=below,
        beta_above=above,
        beta=beta,
        residual_P=normalized,
        bracket_ok=x_tilde < y_star < x_hat,
        singular_threshold=x_hat,
        diagnostics=diagnostics,
    )


def policy_cost(spec, pair, y):
    """
    Long-run average cost of the threshold policy at ``y``: the average of ``pi_mu``
    under the stationary law of the controlled process. Equals ``beta`` at ``y*``
    and is minimal there.
    """
    return StationaryDensity(spec, pair, y).expectation(lambda z: pi_mu(spec, z))


class StationaryDensity(object):
    """
    Stationary density of the process controlled at threshold ``y``:
    proportional to ``m'`` below ``y`` and to ``m' phi / phi(y)`` above.
    """

    def __init__(self, spec, pair, y):
        self.spec = spec
        self.pair = pair
        self.y = y
        self.mass_below = m_measure(spec, y)
        self.mass_above = _weighted_above(spec, pair, np.ones_like, y)
        self.normalizer = self.mass_below + self.mass_above

    @property
    def probability_below(self):
        return self.mass_below / self.normalizer

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        weight = np.where(x <= self.y, 1.0, self.pair.phi_ratio(np.maximum(x, self.y), self.y))
        values = speed_density(self.spec.model, x) * weight / self.normalizer
        return float(values) if values.ndim == 0 else values

    def expectation(self, f):
        """Stationary mean of a vectorized ``f``."""
        spec, y = self.spec, self.y
        below = _lower_integral(spec, lambda z: f(z) * speed_density(spec.model, z), y)
        above = _weighted_above(spec, self.pair, f, y)
        return (below + above) / self.normalizer


SweepEntry = collections.namedtuple('SweepEntry', 'intensity result error g_hat')


class SweepResult(object):
    """
    Per-rate outcomes of :func:`lambda_sweep` in input order, with the singular
    threshold and the monotonicity verdict.

    .. attribute:: monotone

        ``y*`` strictly increases with the rate and stays below the singular threshold.

    .. attribute:: soft

        The drift is negative somewhere, so monotonicity is a diagnostic only.
    """

    csv_header = ('lambda', 'y_star', 'beta_below', 'beta_above', 'beta', 'y_singular', 'gap', 'status')

    def __init__(self, entries, y_singular, monotone, soft):
        self.entries = list(entries)
        self.y_singular = y_singular
        self.monotone = monotone
        self.soft = soft

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def results(self):
        return [e.result for e in self.entries]

    @property
    def thresholds(self):
        return [e.result.y_star if e.result else None for e in self.entries]

    @property
    def gaps(self):
        return [self.y_singular - e.result.y_star if e.result else None for e in self.entries]

    def rows(self):
        for entry in self.entries:
            result = entry.result
            if result is None:
                yield collections.OrderedDict(
                    [('lambda', entry.intensity)]
                    + [(k, None) for k in self.csv_header[1:5]]
                    + [('y_singular', self.y_singular), ('gap', None), ('status', 'error: {}'.format(entry.error))]
                )
            else:
                yield collections.OrderedDict([
                    ('lambda', entry.intensity),
                    ('y_star', result.y_star),
                    ('beta_below', result.beta_below),
                    ('beta_above', result.beta_above),
                    ('beta', result.beta),
                    ('y_singular', self.y_singular),
                    ('gap', self.y_singular - result.y_star),
                    ('status', 'ok'),
                ])


def _monotonicity(entries, y_singular):
    solved = sorted((e for e in entries if e.result is not None), key=lambda e: e.intensity)
    thresholds = [e.result.y_star for e in solved]
    increasing = all(b > a for a, b in zip(thresholds, thresholds[1:]))
    bounded = all(t < y_singular for t in thresholds)
    return increasing and bounded


def lambda_sweep(base_spec, lambdas, jobs=None):
    """
    Solves ``base_spec`` at every rate in ``lambdas``. Failures are recorded per rate
    and the sweep continues.

    Args:
        jobs: number of worker threads; ``None`` lets the executor decide.

    Returns:
        SweepResult
    """
    lambdas = [float(v) for v in lambdas]
    for v in lambdas:
        if not np.isfinite(v) or v <= 0:
            raise InvalidValue('intensities', v, 'every rate must be a positive finite number')

    y_singular = find_x_hat(base_spec)

    def solve_one(intensity):
        try:
            spec = base_spec.with_intensity(intensity)
            pair = build_pair(spec)
            result = solve_threshold(spec, pair, x_hat=y_singular)
            return SweepEntry(intensity, result, None, g_hat(spec, pair, y_singular))
        except NumericalError as e:
            log.warning('lambda=%r failed: %s', intensity, e)
            return SweepEntry(intensity, None, str(e), None)

    if lambdas:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            entries = list(executor.map(solve_one, lambdas))
    else:
        entries = []

    grid = sample_grid(base_spec.model)
    soft = bool(np.any(base_spec.model.drift(grid) < 0))
    monotone = _monotonicity(entries, y_singular)
    if not monotone:
        warnings.warn(
            'y* is not strictly increasing in lambda below the singular threshold{}'.format(
                ' (diagnostic only: the drift is negative somewhere)' if soft else ''),
            RuntimeWarning,
        )
    for entry in entries:
        if entry.result is not None:
            log.debug('lambda=%r: y*=%r, gap=%r', entry.intensity, entry.result.y_star, y_singular - entry.result.y_star)

    return SweepResult(entries, y_singular, monotone, soft)
