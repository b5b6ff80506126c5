"""
The potential value function ``W`` of a solved instance, normalized by ``W(y*) = 0``,
and the checks that certify it.

Below ``y*`` the derivative is ``W'(y) = S'(y) [gamma / S'(y*) + K(y)]`` with
``K(y) = int_y^y* (pi - beta) m'``. It is evaluated as ``S'(y)`` times the cost
accumulated from the lower boundary, which is the same thing at the optimal
``beta`` and does not blow up with ``S'``. Above ``y*`` it is built from the
resolvent of ``pi_gamma`` and the decreasing fundamental solution.
"""
import collections
import logging

import numpy as np

from .diffusions import pi_gamma, pi_mu, scale_density, speed_density
from .quadrature import integrate, integrate_from_lower, integrate_upper_tail


log = logging.getLogger(__name__)


def _upper(spec, f, x, rate):
    tol = spec.tolerances
    hint = max(abs(rate), 1.0 / (1.0 + abs(x)))
    return float(integrate_upper_tail(f, x, tol=tol.quad_tol, tail_tol=tol.tail_tol, decay_hint=hint))


def _lower(spec, f, x):
    tol = spec.tolerances
    return float(integrate_from_lower(f, spec.model.lower, x, tol=tol.quad_tol, tail_tol=tol.tail_tol))


def _resolvent_parts(spec, pair, f, x):
    m = spec.model
    upper = _upper(spec, lambda z: pair.phi_ratio(z, x) * f(z) * speed_density(m, z), x, pair.dlog_phi(x))
    lower = _lower(spec, lambda z: pair.psi_ratio(z, x) * f(z) * speed_density(m, z), x)
    r_phi, r_psi = pair.dlog_phi(x), pair.dlog_psi(x)
    factor = scale_density(m, x) / (r_psi - r_phi)
    return factor, upper, lower, r_phi, r_psi


def resolvent(spec, pair, f, x):
    """
    ``(R f)(x) = E_x int_0^inf exp(-lambda s) f(X_s) ds``, from
    ``B^-1 [psi(x) int_x^inf phi f m' + phi(x) int_l^x psi f m']``.

    Args:
        f: vectorized callable.

    Examples::

        >>> resolvent(spec, pair, np.ones_like, 0.3) * spec.intensity
        1.0000000000...
    """
    factor, upper, lower, _, _ = _resolvent_parts(spec, pair, f, x)
    return factor * (upper + lower)


def resolvent_prime(spec, pair, f, x):
    """``(R f)'(x) = B^-1 [psi'(x) int_x^inf phi f m' + phi'(x) int_l^x psi f m']``."""
    factor, upper, lower, r_phi, r_psi = _resolvent_parts(spec, pair, f, x)
    return factor * (r_psi * upper + r_phi * lower)


def j_function(spec, pair, x):
    """
    ``(gamma - (R pi_gamma)'(x)) / phi'(x)``; its minimum sits at ``x_tilde``.
    """
    slope = resolvent_prime(spec, pair, lambda z: pi_gamma(spec, z), x)
    return (spec.gamma - slope) / pair.phi_prime(x)


def _finite_step(x):
    return max(1e-5, 1e-4 * abs(x))


class ValueFunction(object):
    """
    ``W`` on both sides of ``y*``. Each branch is defined on the whole state space
    so that one-sided derivatives at ``y*`` can be taken by central differences.

    .. attribute:: C

        Coefficient of ``phi`` on the action region (``phi`` normalized to one at the reference point).
    """

    def __init__(self, spec, pair, result):
        self.spec = spec
        self.pair = pair
        self.result = result
        self.y_star = result.y_star
        self.beta = result.beta
        self.gamma = spec.gamma

        y = self.y_star
        self._pi_gamma = lambda z: pi_gamma(spec, z)
        self._resolvent_at_y = resolvent(spec, pair, self._pi_gamma, y)
        self._slope_at_y = resolvent_prime(spec, pair, self._pi_gamma, y)
        self._c_phi = (self.gamma - self._slope_at_y) / pair.dlog_phi(y)
        self.C = self._c_phi * float(np.exp(-pair.log_phi(y)))
        self._scale_at_y = scale_density(spec.model, y)
        # zero up to quadrature error when beta is the optimal average cost
        self._offset = self.gamma / self._scale_at_y - float(self.accumulated_cost(y))

    def __repr__(self):
        return '<{} y*={!r} beta={!r}>'.format(self.__class__.__name__, self.y_star, self.beta)

    def _cost_integrand(self, z):
        return (self.beta - self.spec.cost.running_cost(z)) * speed_density(self.spec.model, z)

    def accumulated_cost(self, x):
        """
        ``int_l^x (beta - pi) m'`` at each point of ``x``: one tail integral up to the
        smallest point, then finite pieces between consecutive points.
        """
        flat = np.ravel(np.asarray(x, dtype=float))
        order = np.argsort(flat, kind='mergesort')
        nodes = flat[order]
        tol = self.spec.tolerances.quad_tol
        start = _lower(self.spec, self._cost_integrand, nodes[0])
        pieces = [integrate(self._cost_integrand, a, b, tol=tol) for a, b in zip(nodes[:-1], nodes[1:])]
        values = np.empty_like(flat)
        values[order] = start + np.concatenate([[0.0], np.cumsum(pieces)])
        return values.reshape(np.shape(x))

    def k(self, y):
        """``K(y) = int_y^y* (pi - beta) m'``, zero at ``y*``."""
        return float(self.accumulated_cost(self.y_star)) - self.accumulated_cost(y)

    def below_derivative(self, x):
        """
        ``W'`` from the continuation-region formula, written as
        ``S'(x) [int_l^x (beta - pi) m' + offset]`` so that it stays bounded where
        ``S'`` is large and equals ``gamma`` at ``y*``.
        """
        x = np.asarray(x, dtype=float)
        values = scale_density(self.spec.model, x) * (self.accumulated_cost(x) + self._offset)
        return float(values) if values.ndim == 0 else values

    def above_derivative(self, x):
        """``W'`` from the action-region formula."""
        def one(v):
            slope = resolvent_prime(self.spec, self.pair, self._pi_gamma, v)
            return slope + self._c_phi * self.pair.dlog_phi(v) * float(self.pair.phi_ratio(v, self.y_star))
        return _map(one, x)

    def below_value(self, x):
        tol = self.spec.tolerances.quad_tol
        return _map(lambda v: -integrate(self.below_derivative, v, self.y_star, tol=tol), x)

    def above_value(self, x):
        def one(v):
            r = resolvent(self.spec, self.pair, self._pi_gamma, v)
            return r - self._resolvent_at_y + self._c_phi * (float(self.pair.phi_ratio(v, self.y_star)) - 1.0)
        return _map(one, x)

    def evaluate(self, x):
        """``W(x)`` with ``W(y*) = 0``."""
        return _map(lambda v: self.below_value(v) if v < self.y_star else self.above_value(v), x)

    __call__ = evaluate

    def derivative(self, x):
        return _map(lambda v: self.below_derivative(v) if v < self.y_star else self.above_derivative(v), x)

    def second_derivative(self, x, side=None):
        """
        Central difference of ``W'`` with step ``max(1e-5, 1e-4 |x|)``. ``side`` picks a branch
        (``'below'`` or ``'above'``); by default the branch containing ``x``.
        """
        def one(v):
            branch = side or ('below' if v < self.y_star else 'above')
            derivative = self.below_derivative if branch == 'below' else self.above_derivative
            h = _finite_step(v)
            return (derivative(v + h) - derivative(v - h)) / (2 * h)
        return _map(one, x)

    def expected_curvature(self):
        """``(2 / sigma^2(y*)) (beta - pi_mu(y*))``, the common second derivative at ``y*``."""
        y = self.y_star
        sigma = float(self.spec.model.volatility(y))
        return 2.0 / sigma ** 2 * (self.beta - pi_mu(self.spec, y))


def _map(function, x):
    if np.ndim(x) == 0:
        return float(function(float(x)))
    return np.array([function(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))


def build_value_function(spec, pair, result):
    return ValueFunction(spec, pair, result)


VariationalRow = collections.namedtuple('VariationalRow', 'x region derivative_gap sign_ok residual residual_ok')


class VariationalReport(object):
    def __init__(self, rows, tolerance):
        self.rows = list(rows)
        self.tolerance = tolerance

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    @property
    def passed(self):
        return all(r.sign_ok and r.residual_ok for r in self.rows)

    @property
    def failures(self):
        return [r for r in self.rows if not (r.sign_ok and r.residual_ok)]

    def as_rows(self):
        return [r._asdict() for r in self.rows]


def _generator(spec, vf, x, side):
    h = _finite_step(x)
    derivative = vf.below_derivative if side == 'below' else vf.above_derivative
    first = derivative(x)
    second = (derivative(x + h) - derivative(x - h)) / (2 * h)
    sigma = float(spec.model.volatility(x))
    return 0.5 * sigma ** 2 * second + float(spec.model.drift(x)) * first, first


def _below_residual(spec, vf, x):
    generator, first = _generator(spec, vf, x, 'below')
    return generator + float(spec.cost.running_cost(x)) - vf.beta, first


def _above_residual(spec, vf, x):
    generator, first = _generator(spec, vf, x, 'above')
    value = vf.above_value(x)
    cost = float(spec.cost.running_cost(x))
    return (generator - spec.intensity * value + cost
            + spec.intensity * spec.gamma * (x - vf.y_star) - vf.beta), first


def variational_check(spec, vf, grid, tolerance=None):
    """
    Checks on ``grid``: the sign of ``W' - gamma`` on each side of ``y*``, the ODE
    ``A W + pi - beta = 0`` below ``y*``, and
    ``(A - lambda) W + pi + lambda gamma (x - y*) - beta = 0`` above it.

    Returns:
        VariationalReport
    """
    tolerance = tolerance or 1e-4 * max(1.0, abs(vf.beta))
    rows = []
    for x in np.asarray(grid, dtype=float):
        at_boundary = abs(x - vf.y_star) <= 1e-9 * max(1.0, abs(vf.y_star))
        if at_boundary:
            below, _ = _below_residual(spec, vf, x)
            above, first = _above_residual(spec, vf, x)
            residual = max(below, above, key=abs)
            rows.append(VariationalRow(x, 'boundary', first - vf.gamma, True, residual,
                                       abs(below) <= tolerance and abs(above) <= tolerance))
            continue
        if x < vf.y_star:
            residual, first = _below_residual(spec, vf, x)
            sign_ok = first - vf.gamma < 0
            region = 'below'
        else:
            residual, first = _above_residual(spec, vf, x)
            sign_ok = first - vf.gamma > 0
            region = 'above'
        rows.append(VariationalRow(x, region, first - vf.gamma, bool(sign_ok), residual, abs(residual) <= tolerance))

    report = VariationalReport(rows, tolerance)
    for row in report.failures:
        log.info('Variational check fails at x=%r (%s): W\'-gamma=%r residual=%r',
                 row.x, row.region, row.derivative_gap, row.residual)
    return report


GrowthCondition = collections.namedtuple('GrowthCondition', 'exponent constant holds points')


def growth_condition(spec, grid, exponent):
    """
    Largest ``C`` with ``pi(x) >= C (|x|^exponent - 1)`` on the points of ``grid`` with
    ``|x| > 1``. The condition is recorded, not proved: ``holds`` only says ``C > 0``
    on the sample.
    """
    grid = np.asarray(grid, dtype=float)
    points = grid[np.abs(grid) > 1.0]
    if len(points) == 0:
        return GrowthCondition(exponent, None, False, 0)
    ratios = spec.cost.running_cost(points) / (np.abs(points) ** exponent - 1.0)
    constant = float(np.min(ratios))
    return GrowthCondition(exponent, constant, constant > 0, len(points))
