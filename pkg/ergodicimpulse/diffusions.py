"""
Diffusion and cost models, their scale and speed densities, and the problem
specification tying them to a Poisson signal rate.

All model callables are vectorized: they accept numpy arrays and return arrays
of the same shape. Module-level functions return a plain ``float`` for scalar input.
"""
import collections
import logging

import numpy as np
from scipy import special
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from .exceptions import AssumptionViolation, InvalidValue, ModelEvaluationError
from .quadrature import Integrand, integrate, numeric_speed_measure


log = logging.getLogger(__name__)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _like(x, values):
    if np.ndim(x) == 0:
        return float(np.asarray(values).reshape(()))
    return values


def _checked(values, x, what):
    values = np.asarray(values, dtype=float)
    if values.shape != np.shape(x):
        values = np.broadcast_to(values, np.shape(x)).astype(float)
    bad = ~np.isfinite(values)
    if np.any(bad):
        raise ModelEvaluationError(float(np.asarray(x, dtype=float)[bad].flat[0]), 'non-finite {}'.format(what))
    return values


class DiffusionModel(object):
    """
    A one-dimensional diffusion ``dX = mu(X) dt + sigma(X) dW`` on ``(lower, inf)``.

    Args:
        drift: vectorized callable ``x -> mu(x)``.
        volatility: vectorized callable ``x -> sigma(x)``, positive on the interior.
        lower: ``0.0`` or ``-inf``.
        scale_anchor: the point where the scale density equals one;
            defaults to ``1`` on the positive half-line and ``0`` on the real line.
        name: label used in reports.
        parameters: ordered parameter record used in reports.

    Subclasses with closed forms override :meth:`log_scale_density`,
    :meth:`speed_density` and :meth:`speed_measure` and set :attr:`tag`.
    """

    #: Closed-form family; ``'none'`` selects the numeric routes.
    tag = 'none'

    def __init__(self, drift, volatility, lower=0.0, scale_anchor=None, name='custom', parameters=None):
        if lower not in (0.0, -np.inf):
            raise ValueError('lower boundary must be 0 or -inf, got {!r}'.format(lower))
        self._drift = drift
        self._volatility = volatility
        self.lower = float(lower)
        self.upper = np.inf
        if scale_anchor is None:
            scale_anchor = 1.0 if self.lower == 0.0 else 0.0
        self.scale_anchor = float(scale_anchor)
        self.name = name
        self.parameters = collections.OrderedDict(parameters or ())

    def __repr__(self):
        params = ', '.join('{}={!r}'.format(k, v) for k, v in self.parameters.items())
        return '<{} {}({})>'.format(self.__class__.__name__, self.name, params)

    @property
    def on_half_line(self):
        return self.lower == 0.0

    def is_interior(self, x):
        return np.all(np.asarray(x) > self.lower) and np.all(np.isfinite(x))

    def drift(self, x):
        return _checked(self._drift(np.asarray(x, dtype=float)), x, 'drift')

    def volatility(self, x):
        values = _checked(self._volatility(np.asarray(x, dtype=float)), x, 'volatility')
        if np.any(values <= 0):
            bad = np.asarray(x, dtype=float)[values <= 0]
            raise ModelEvaluationError(float(bad.flat[0]), 'non-positive volatility')
        return values

    def coefficients(self):
        """Raw ``(drift, volatility)`` callables, without finiteness checks."""
        return self._drift, self._volatility

    def describe(self):
        return collections.OrderedDict([('name', self.name), ('parameters', dict(self.parameters))])

    def numeric_log_scale_density(self, x):
        """
        ``-int_anchor^x 2 mu / sigma^2`` by Gauss-Legendre quadrature, in ``log z``
        on the half-line. Points where one panel and two half panels disagree are
        recomputed adaptively.
        """
        points = np.atleast_1d(np.asarray(x, dtype=float))
        anchor = self.scale_anchor

        if self.on_half_line:
            def integrand(s):
                z = anchor * np.exp(s)
                return 2.0 * self.drift(z) * z / self.volatility(z) ** 2
            upper = np.log(points / anchor)
        else:
            def integrand(s):
                z = anchor + s
                return 2.0 * self.drift(z) / self.volatility(z) ** 2
            upper = points - anchor

        def panel(lo, hi):
            half = 0.5 * (hi - lo)
            nodes = (lo + half)[:, None] + half[:, None] * _GL_NODES[None, :]
            return half * (integrand(nodes) @ _GL_WEIGHTS)

        zeros = np.zeros_like(upper)
        whole = panel(zeros, upper)
        split = panel(zeros, 0.5 * upper) + panel(0.5 * upper, upper)
        suspect = np.abs(whole - split) > 1e-12 * np.maximum(1.0, np.abs(split))
        for i in np.flatnonzero(suspect):
            split[i] = integrate(Integrand(integrand), 0.0, float(upper[i]), tol=1e-13)
        return _like(x, -split)

    def log_scale_density(self, x):
        return self.numeric_log_scale_density(x)

    def scale_density(self, x):
        return np.exp(self.log_scale_density(x))

    def speed_density(self, x):
        return 2.0 / (self.volatility(x) ** 2 * self.scale_density(x))

    def speed_measure(self, x, tol=1e-11, tail_tol=1e-13):
        return numeric_speed_measure(self, x, tol=tol, tail_tol=tail_tol)


class VerhulstPearl(DiffusionModel):
    """
    Logistic diffusion ``dX = mu X (1 - b X) dt + sigma X dW`` on the positive half-line.
    """

    tag = 'verhulst_pearl'

    def __init__(self, mu=1.0, sigma=1.0, b=0.01, scale_anchor=1.0):
        self.mu = float(mu)
        self.sigma = float(sigma)
        self.b = float(b)
        super(VerhulstPearl, self).__init__(
            drift=lambda x: self.mu * x * (1.0 - self.b * x),
            volatility=lambda x: self.sigma * x,
            lower=0.0,
            scale_anchor=scale_anchor,
            name='verhulst_pearl',
            parameters=[('mu', self.mu), ('sigma', self.sigma), ('b', self.b)],
        )

    @property
    def k(self):
        """Coefficient ``2 mu b / sigma^2`` of the exponential factor."""
        return 2.0 * self.mu * self.b / self.sigma ** 2

    @property
    def p(self):
        """Power ``2 mu / sigma^2 - 1`` of the speed density near zero."""
        return 2.0 * self.mu / self.sigma ** 2 - 1.0

    def log_scale_density(self, x):
        x = np.asarray(x, dtype=float)
        a = self.scale_anchor
        return -(2.0 * self.mu / self.sigma ** 2) * np.log(x / a) + self.k * (x - a)

    def speed_density(self, x):
        x = np.asarray(x, dtype=float)
        a = self.scale_anchor
        return (2.0 / self.sigma ** 2) * x ** (self.p - 1.0) * a ** -(self.p + 1.0) * np.exp(-self.k * (x - a))

    def speed_measure(self, x, tol=1e-11, tail_tol=1e-13):
        if self.p <= 0:
            raise AssumptionViolation(
                'finite speed measure',
                'm(0, x) diverges when 2 mu / sigma^2 <= 1 (got {!r})'.format(self.p + 1.0),
            )
        x = np.asarray(x, dtype=float)
        a = self.scale_anchor
        scale = (2.0 / self.sigma ** 2) * a ** -(self.p + 1.0)
        if self.k == 0:
            return scale * x ** self.p / self.p
        log_front = self.k * a - self.p * np.log(self.k) + special.gammaln(self.p)
        return scale * np.exp(log_front) * special.gammainc(self.p, self.k * x)


class OrnsteinUhlenbeck(DiffusionModel):
    """
    Mean-reverting diffusion ``dX = -b X dt + dW`` on the real line.
    """

    tag = 'ornstein_uhlenbeck'

    def __init__(self, b=0.1):
        self.b = float(b)
        super(OrnsteinUhlenbeck, self).__init__(
            drift=lambda x: -self.b * x,
            volatility=lambda x: np.ones_like(x),
            lower=-np.inf,
            scale_anchor=0.0,
            name='ornstein_uhlenbeck',
            parameters=[('b', self.b)],
        )

    def log_scale_density(self, x):
        return self.b * np.asarray(x, dtype=float) ** 2

    def speed_density(self, x):
        return 2.0 * np.exp(-self.b * np.asarray(x, dtype=float) ** 2)

    def speed_measure(self, x, tol=1e-11, tail_tol=1e-13):
        root = np.sqrt(self.b)
        return np.sqrt(np.pi) / root * special.erfc(-np.asarray(x, dtype=float) * root)


class BrownianMotion(DiffusionModel):
    """
    Brownian motion with constant drift and volatility on the real line.

    Its speed measure near ``-inf`` is finite only for positive drift.
    """

    tag = 'brownian_motion'

    def __init__(self, drift=0.0, volatility=1.0):
        self.m = float(drift)
        self.s = float(volatility)
        super(BrownianMotion, self).__init__(
            drift=lambda x: np.full_like(x, self.m),
            volatility=lambda x: np.full_like(x, self.s),
            lower=-np.inf,
            scale_anchor=0.0,
            name='brownian_motion',
            parameters=[('drift', self.m), ('volatility', self.s)],
        )

    def log_scale_density(self, x):
        return -2.0 * self.m * np.asarray(x, dtype=float) / self.s ** 2

    def speed_density(self, x):
        return (2.0 / self.s ** 2) * np.exp(2.0 * self.m * np.asarray(x, dtype=float) / self.s ** 2)

    def speed_measure(self, x, tol=1e-11, tail_tol=1e-13):
        if self.m <= 0:
            raise AssumptionViolation(
                'finite speed measure',
                'm(-inf, x) diverges for Brownian motion with drift {!r}'.format(self.m),
            )
        return np.exp(2.0 * self.m * np.asarray(x, dtype=float) / self.s ** 2) / self.m

    def rates(self, intensity):
        """
        Exponential rates ``(r_minus, r_plus)`` of the decreasing and increasing
        solutions of ``(A - lambda) f = 0``.
        """
        root = np.sqrt(self.m ** 2 + 2.0 * intensity * self.s ** 2)
        return (-self.m - root) / self.s ** 2, (-self.m + root) / self.s ** 2


def verhulst_pearl(mu=1.0, sigma=1.0, b=0.01, scale_anchor=1.0):
    return VerhulstPearl(mu=mu, sigma=sigma, b=b, scale_anchor=scale_anchor)


def ornstein_uhlenbeck(b=0.1):
    return OrnsteinUhlenbeck(b=b)


def brownian_motion(drift=0.0, volatility=1.0):
    return BrownianMotion(drift=drift, volatility=volatility)


def diffusion_model(drift, volatility, lower=0.0, scale_anchor=None, name='custom'):
    """
    A model with user-supplied vectorized drift and volatility and no closed forms.
    Fundamental solutions for it come from the ODE route.
    """
    return DiffusionModel(drift, volatility, lower=lower, scale_anchor=scale_anchor, name=name)


_builtin_models = {
    'verhulst_pearl': verhulst_pearl,
    'ornstein_uhlenbeck': ornstein_uhlenbeck,
    'brownian_motion': brownian_motion,
}


def model_by_name(name, **parameters):
    try:
        factory = _builtin_models[name]
    except KeyError:
        raise InvalidValue('model.name', name, 'expected one of {}'.format(sorted(_builtin_models)))
    return factory(**parameters)


def log_scale_density(model, x, closed_form=True):
    if closed_form:
        values = model.log_scale_density(x)
    else:
        values = model.numeric_log_scale_density(x)
    return _like(x, _checked(values, x, 'scale density'))


def scale_density(model, x, closed_form=True):
    """
    Scale density ``S'(x) = exp(-int_anchor^x 2 mu / sigma^2)``.

    Examples::

        >>> scale_density(ornstein_uhlenbeck(0.1), 2.0)
        1.4918246976412703
    """
    return _like(x, np.exp(log_scale_density(model, x, closed_form=closed_form)))


def speed_density(model, x, closed_form=True):
    """
    Speed density ``m'(x) = 2 / (sigma^2(x) S'(x))``.
    """
    if closed_form:
        values = model.speed_density(x)
    else:
        values = 2.0 / (model.volatility(x) ** 2 * scale_density(model, x, closed_form=False))
    return _like(x, _checked(values, x, 'speed density'))


def speed_measure(model, x, tol=1e-11, tail_tol=1e-13, closed_form=True):
    """
    Speed measure ``m(l, x)`` of ``(l, x]``.

    Raises:
        AssumptionViolation: the measure near the lower boundary is infinite.
    """
    if closed_form:
        return _like(x, model.speed_measure(x, tol=tol, tail_tol=tail_tol))
    if np.ndim(x) == 0:
        return numeric_speed_measure(model, float(x), tol=tol, tail_tol=tail_tol)
    return np.array([numeric_speed_measure(model, float(v), tol=tol, tail_tol=tail_tol) for v in np.ravel(x)]).reshape(np.shape(x))


class CostModel(object):
    """
    Running cost ``pi`` and proportional control cost ``gamma``.

    Args:
        running_cost: vectorized callable ``x -> pi(x)``.
        gamma: unit cost of control; a negative value is a revenue per unit
            (harvesting problems).
        x_star: minimizer of ``pi_mu``; located numerically when ``None``.
    """

    def __init__(self, running_cost, gamma=1.0, x_star=None, name='custom', parameters=None):
        if not np.isfinite(gamma):
            raise InvalidValue('cost.gamma', gamma, 'must be a finite number')
        self._running_cost = running_cost
        self.gamma = float(gamma)
        self.x_star = None if x_star is None else float(x_star)
        self.name = name
        self.parameters = collections.OrderedDict(parameters or ())

    def __repr__(self):
        return '<{} {} gamma={!r}>'.format(self.__class__.__name__, self.name, self.gamma)

    def running_cost(self, x):
        return _checked(self._running_cost(np.asarray(x, dtype=float)), x, 'running cost')

    @property
    def unchecked_running_cost(self):
        return self._running_cost

    def describe(self):
        return collections.OrderedDict([
            ('name', self.name),
            ('gamma', self.gamma),
            ('parameters', dict(self.parameters)),
        ])


def power_cost(exponent=2.0, gamma=1.0, x_star=None):
    """``pi(x) = |x|^exponent``."""
    return CostModel(
        lambda x: np.abs(x) ** exponent, gamma=gamma, x_star=x_star,
        name='power', parameters=[('exponent', float(exponent))],
    )


def absolute_cost(gamma=1.0, x_star=None):
    return CostModel(np.abs, gamma=gamma, x_star=x_star, name='absolute')


def table_cost(x, y, gamma=1.0, x_star=None):
    """
    Monotone piecewise cubic running cost through the points ``(x, y)``, continued
    linearly beyond the table. ``x_star`` must be given explicitly.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x_star is None:
        raise InvalidValue('cost.x_star', x_star, 'a tabulated cost needs an explicit x_star')
    if x.ndim != 1 or x.shape != y.shape or len(x) < 2:
        raise InvalidValue('cost.table', list(x), 'x and y must be equally long lists of at least 2 points')
    if np.any(np.diff(x) <= 0):
        raise InvalidValue('cost.table.x', list(x), 'must be strictly increasing')

    curve = PchipInterpolator(x, y, extrapolate=False)
    slope = curve.derivative()
    left, right = x[0], x[-1]
    left_slope, right_slope = float(slope(left)), float(slope(right))

    def running_cost(z):
        z = np.asarray(z, dtype=float)
        inside = np.clip(z, left, right)
        values = curve(inside)
        values = np.where(z < left, y[0] + left_slope * (z - left), values)
        return np.where(z > right, y[-1] + right_slope * (z - right), values)

    return CostModel(
        running_cost, gamma=gamma, x_star=x_star, name='table',
        parameters=[('x', x.tolist()), ('y', y.tolist())],
    )


Tolerances = collections.namedtuple('Tolerances', 'quad_tol root_tol tail_tol beta_consistency_tol')
Tolerances.__new__.__defaults__ = (1e-11, 1e-10, 1e-13, 1e-6)


class ProblemSpec(object):
    """
    A diffusion, a cost and the Poisson signal rate ``intensity`` (lambda).

    Args:
        minimizer_bracket: optional ``(lo, hi)`` restricting the search for ``x*``.
    """

    def __init__(self, model, cost, intensity, tolerances=None, minimizer_bracket=None):
        if not np.isfinite(intensity) or intensity <= 0:
            raise InvalidValue('intensity', intensity, 'must be a positive finite number')
        tolerances = tolerances or Tolerances()
        for name, value in tolerances._asdict().items():
            if not np.isfinite(value) or value <= 0:
                raise InvalidValue('tolerances.{}'.format(name), value, 'must be a positive finite number')

        self.model = model
        self.cost = cost
        self.intensity = float(intensity)
        self.tolerances = tolerances
        self.minimizer_bracket = minimizer_bracket
        self._x_star = cost.x_star

    def __repr__(self):
        return '<{} {!r} {!r} lambda={!r}>'.format(self.__class__.__name__, self.model, self.cost, self.intensity)

    @property
    def gamma(self):
        return self.cost.gamma

    @property
    def x_star(self):
        """Minimizer of ``pi_mu``; located on first access when the cost does not supply it."""
        if self._x_star is None:
            self._x_star = minimizer_of_pi_mu(self, bracket=self.minimizer_bracket)
        return self._x_star

    def with_intensity(self, intensity):
        """
        Returns a copy of this spec with another signal rate. ``x*`` does not depend
        on the rate and is carried over.
        """
        clone = ProblemSpec(self.model, self.cost, intensity, tolerances=self.tolerances,
                            minimizer_bracket=self.minimizer_bracket)
        clone._x_star = self._x_star
        return clone

    def describe(self):
        return collections.OrderedDict([
            ('model', self.model.describe()),
            ('cost', self.cost.describe()),
            ('intensity', self.intensity),
        ])


def pi_mu(spec, x):
    """``pi_mu(x) = pi(x) + gamma mu(x)``."""
    return _like(x, spec.cost.running_cost(x) + spec.gamma * spec.model.drift(x))


def pi_gamma(spec, x):
    """``pi_gamma(x) = pi(x) + gamma lambda x``."""
    return _like(x, spec.cost.running_cost(x) + spec.gamma * spec.intensity * np.asarray(x, dtype=float))


def sample_grid(model, n=401, low=1e-3, high=1e2):
    """
    Sample points of the state space: geometric on the half-line (scaled by the
    anchor), sinh-spaced and symmetric around the anchor on the real line.
    An odd ``n`` puts the anchor itself on the real-line grid.
    """
    if model.on_half_line:
        return model.scale_anchor * np.geomspace(low, high, n)
    edge = np.arcsinh(high)
    return model.scale_anchor + np.sinh(np.linspace(-edge, edge, n))


def minimizer_of_pi_mu(spec, bracket=None, n=401):
    """
    Locates ``x*`` by sampling ``pi_mu`` and refining with golden-section search.

    Raises:
        AssumptionViolation: the sampled minimum sits at the edge of the search range.
    """
    if bracket is None:
        grid = sample_grid(spec.model, n=n)
    else:
        lo, hi = bracket
        grid = np.linspace(lo, hi, n)
    values = pi_mu(spec, grid)
    i = int(np.argmin(values))
    if i == 0 or i == len(grid) - 1:
        raise AssumptionViolation(
            'interior minimizer of pi_mu',
            'sampled minimum at the edge of [{!r}, {!r}]'.format(grid[0], grid[-1]),
        )
    if values[i] == values[i - 1] or values[i] == values[i + 1]:
        return float(grid[i])

    result = minimize_scalar(lambda z: pi_mu(spec, z), bracket=(grid[i - 1], grid[i], grid[i + 1]),
                             method='golden', tol=1e-12)
    x_star = float(result.x)
    log.debug('x* located at %r (pi_mu = %r)', x_star, float(result.fun))
    return x_star
