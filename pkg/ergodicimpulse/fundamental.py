"""
Decreasing and increasing fundamental solutions of ``(A - lambda) f = 0``.

A :class:`FundamentalPair` works in logs: it exposes ``log_phi`` and the
logarithmic derivative ``dlog_phi = phi' / phi`` (same for ``psi``). Both solutions
are normalized to one at the reference point ``x_ref``, the scale anchor of the model.
"""
import logging

import numpy as np
from scipy.integrate import solve_ivp

from .diffusions import log_scale_density, scale_density
from .exceptions import FundamentalSolutionError
from .quadrature import integrate
from .special import log_kummer_m, log_kummer_u, log_parabolic_cylinder_d, kummer_m


log = logging.getLogger(__name__)


CLOSED_FORM = 'closed_form'
ODE_NUMERIC = 'ode_numeric'


def _array(x):
    return np.atleast_1d(np.asarray(x, dtype=float))


def _like(x, values):
    if np.ndim(x) == 0:
        return float(np.asarray(values).reshape(-1)[0])
    return np.asarray(values).reshape(np.shape(x))


class FundamentalPair(object):
    """
    Args:
        log_phi, dlog_phi, log_psi, dlog_psi: vectorized callables of unnormalized
            solutions; ``log_phi`` and ``log_psi`` are shifted so that they vanish at ``x_ref``.
        provenance: :data:`CLOSED_FORM` or :data:`ODE_NUMERIC`.

    All public evaluators accept scalars or arrays.
    """

    def __init__(self, model, intensity, log_phi, dlog_phi, log_psi, dlog_psi, provenance, x_ref=None):
        self.model = model
        self.intensity = float(intensity)
        self.provenance = provenance
        self.x_ref = model.scale_anchor if x_ref is None else float(x_ref)

        self._log_phi = log_phi
        self._dlog_phi = dlog_phi
        self._log_psi = log_psi
        self._dlog_psi = dlog_psi
        self._phi_shift = float(_array(log_phi(_array(self.x_ref)))[0])
        self._psi_shift = float(_array(log_psi(_array(self.x_ref)))[0])

        rates = self.dlog_phi(self.x_ref), self.dlog_psi(self.x_ref)
        self.wronskian = (rates[1] - rates[0]) / scale_density(model, self.x_ref)

    def __repr__(self):
        return '<{} {} lambda={!r} {}>'.format(self.__class__.__name__, self.model.name, self.intensity, self.provenance)

    def log_phi(self, x):
        return _like(x, _array(self._log_phi(_array(x))) - self._phi_shift)

    def dlog_phi(self, x):
        return _like(x, self._dlog_phi(_array(x)))

    def log_psi(self, x):
        return _like(x, _array(self._log_psi(_array(x))) - self._psi_shift)

    def dlog_psi(self, x):
        return _like(x, self._dlog_psi(_array(x)))

    def phi(self, x):
        return _like(x, np.exp(self.log_phi(x)))

    def phi_prime(self, x):
        return _like(x, np.exp(self.log_phi(x)) * self.dlog_phi(x))

    def psi(self, x):
        return _like(x, np.exp(self.log_psi(x)))

    def psi_prime(self, x):
        return _like(x, np.exp(self.log_psi(x)) * self.dlog_psi(x))

    def phi_ratio(self, z, x):
        """``phi(z) / phi(x)`` without forming either value."""
        return np.exp(np.asarray(self.log_phi(z)) - self.log_phi(x))

    def psi_ratio(self, z, x):
        return np.exp(np.asarray(self.log_psi(z)) - self.log_psi(x))

    def wronskian_at(self, x):
        """
        ``(psi' phi - phi' psi) / S'`` evaluated at ``x``; constant in ``x`` for an exact pair.
        """
        logs = np.asarray(self.log_phi(x)) + np.asarray(self.log_psi(x)) - np.asarray(log_scale_density(self.model, x))
        return _like(x, np.exp(logs) * (np.asarray(self.dlog_psi(x)) - np.asarray(self.dlog_phi(x))))


def _logistic_pair(spec):
    model = spec.model
    s2 = model.sigma ** 2
    drift_term = 0.5 - model.mu / s2
    root = np.sqrt(drift_term ** 2 + 2.0 * spec.intensity / s2)
    alpha1, alpha2 = drift_term + root, drift_term - root
    k = model.k

    if k == 0:
        return FundamentalPair(
            model, spec.intensity,
            log_phi=lambda x: alpha2 * np.log(x), dlog_phi=lambda x: alpha2 / x,
            log_psi=lambda x: alpha1 * np.log(x), dlog_psi=lambda x: alpha1 / x,
            provenance=CLOSED_FORM,
        )

    a, b = alpha1, 1.0 + alpha1 - alpha2

    def log_phi(x):
        return alpha1 * np.log(x) + log_kummer_u(a, b, k * x)

    def dlog_phi(x):
        ratio = np.exp(log_kummer_u(a + 1.0, b + 1.0, k * x) - log_kummer_u(a, b, k * x))
        return alpha1 / x - k * a * ratio

    def log_psi(x):
        return alpha1 * np.log(x) + log_kummer_m(a, b, k * x)

    def dlog_psi(x):
        ratio = kummer_m(a + 1.0, b + 1.0, k * x) / kummer_m(a, b, k * x)
        return alpha1 / x + k * (a / b) * ratio

    return FundamentalPair(model, spec.intensity, log_phi, dlog_phi, log_psi, dlog_psi, CLOSED_FORM)


def _mean_reverting_pair(spec):
    b = spec.model.b
    nu = -spec.intensity / b
    scale = np.sqrt(2.0 * b)

    def log_phi(x):
        return 0.5 * b * x * x + log_parabolic_cylinder_d(nu, scale * x)

    def dlog_phi(x):
        z = scale * x
        return scale * nu * np.exp(log_parabolic_cylinder_d(nu - 1.0, z) - log_parabolic_cylinder_d(nu, z))

    return FundamentalPair(
        spec.model, spec.intensity,
        log_phi=log_phi, dlog_phi=dlog_phi,
        log_psi=lambda x: log_phi(-x), dlog_psi=lambda x: -dlog_phi(-x),
        provenance=CLOSED_FORM,
    )


def _brownian_pair(spec):
    r_minus, r_plus = spec.model.rates(spec.intensity)
    return FundamentalPair(
        spec.model, spec.intensity,
        log_phi=lambda x: r_minus * x, dlog_phi=lambda x: np.full_like(x, r_minus),
        log_psi=lambda x: r_plus * x, dlog_psi=lambda x: np.full_like(x, r_plus),
        provenance=CLOSED_FORM,
    )


_closed_forms = {
    'verhulst_pearl': _logistic_pair,
    'ornstein_uhlenbeck': _mean_reverting_pair,
    'brownian_motion': _brownian_pair,
}


def build_pair(spec, closed_form=True):
    """
    Fundamental pair of ``spec.model`` at rate ``spec.intensity``: closed form for the
    built-in models, ODE route for everything else (or when ``closed_form=False``).

    Examples::

        >>> pair = build_pair(ProblemSpec(brownian_motion(), absolute_cost(), 2.0))
        >>> pair.phi(1.0), pair.wronskian
        (0.1353352832366127, 4.0)
    """
    factory = _closed_forms.get(spec.model.tag) if closed_form else None
    if factory is None:
        return ode_pair(spec)
    pair = factory(spec)
    log.debug('Built closed-form pair for %r', pair)
    return pair


class _RiccatiBranch(object):
    """
    One fundamental solution as the dense solution of the Riccati system
    ``(log f)' = r``, ``r' = 2 (lambda - mu r) / sigma^2 - r^2``.

    On the half-line the system is integrated in ``t = log x``.
    """

    def __init__(self, model, intensity, start, stop, initial_rate, tol):
        self.model = model
        self.intensity = intensity
        self.log_axis = model.on_half_line
        t0, t1 = self._t(start), self._t(stop)

        def rhs(t, y):
            x = self._x(t)
            mu = float(model.drift(x))
            s2 = float(model.volatility(x)) ** 2
            r = y[1]
            slope = 2.0 * (intensity - mu * r) / s2 - r * r
            if self.log_axis:
                return [x * r, x * slope]
            return [r, slope]

        solution = solve_ivp(rhs, (t0, t1), [0.0, initial_rate], method='RK45', dense_output=True,
                             rtol=tol, atol=tol)
        if solution.status != 0:
            raise FundamentalSolutionError('ODE integration failed: {}'.format(solution.message))
        self.solution = solution
        self.t_lo, self.t_hi = min(t0, t1), max(t0, t1)
        log.debug('Riccati branch on [%r, %r]: %d steps', start, stop, len(solution.t))

    def _t(self, x):
        return np.log(x) if self.log_axis else x

    def _x(self, t):
        return np.exp(t) if self.log_axis else t

    def state(self, x):
        """Returns ``(log f, r)`` arrays, extrapolated beyond the integrated range."""
        x = _array(x)
        t = self._t(x)
        inside = np.clip(t, self.t_lo, self.t_hi)
        log_f, rate = self.solution.sol(inside)

        x_lo, x_hi = self._x(self.t_lo), self._x(self.t_hi)
        above = t > self.t_hi
        below = t < self.t_lo
        if np.any(above):
            log_f = np.where(above, log_f + rate * (x - x_hi), log_f)
        if np.any(below):
            if self.log_axis:
                log_f = np.where(below, log_f + rate * x_lo * np.log(x / x_lo), log_f)
                rate = np.where(below, rate * x_lo / x, rate)
            else:
                log_f = np.where(below, log_f + rate * (x - x_lo), log_f)
        return log_f, rate

    def rates(self, x):
        return self.state(x)[1]


def _local_rates(model, intensity, x):
    mu = model.drift(x)
    s2 = model.volatility(x) ** 2
    root = np.sqrt(mu * mu + 2.0 * intensity * s2)
    return (-mu - root) / s2, (-mu + root) / s2, 2.0 * root / s2


def working_range(model, depth=50.0, cap=1024.0):
    """
    Interval where fundamental solutions are integrated accurately: a fixed
    geometric range on the half-line, and on the real line the symmetric range
    around the anchor where ``log m'`` falls ``depth`` below its anchor value.
    """
    anchor = model.scale_anchor
    if model.on_half_line:
        return anchor * 1e-4, anchor * 1e2
    from .diffusions import speed_density
    top = np.log(speed_density(model, anchor))
    bounds = []
    for side in (-1.0, 1.0):
        reach = 1.0
        while reach < cap and np.log(speed_density(model, anchor + side * reach)) > top - depth:
            reach *= 2.0
        bounds.append(anchor + side * reach)
    return bounds[0], bounds[1]


def _extend(model, intensity, x, direction, damping=40.0, max_steps=64):
    """
    Moves from ``x`` in ``direction`` until the decaying and growing modes have
    separated by ``damping`` in log.
    """
    accumulated = 0.0
    for _ in range(max_steps):
        if model.on_half_line:
            step_to = x * (2.0 if direction > 0 else 0.5)
        else:
            step_to = x + direction * max(1.0, 0.5 * abs(x - model.scale_anchor))
        gap = integrate(lambda z: _local_rates(model, intensity, z)[2], min(x, step_to), max(x, step_to), tol=1e-6)
        accumulated += gap
        x = step_to
        if accumulated >= damping:
            return x
    raise FundamentalSolutionError('no mode separation within {} steps from {!r}'.format(max_steps, x))


def ode_pair(spec, retries=6, tol=1e-11):
    """
    Fundamental pair from integrating the Riccati form of ``(A - lambda) f = 0``:
    ``phi`` backward from a far right point, ``psi`` forward from a far left point,
    each starting on the local decaying (resp. growing) rate.

    Raises:
        FundamentalSolutionError: ``phi`` is not decreasing on the working range after
            ``retries`` enlargements of the far right point.
    """
    model, intensity = spec.model, spec.intensity
    lo, hi = working_range(model)
    samples = np.linspace(lo, hi, 257) if not model.on_half_line else np.geomspace(lo, hi, 257)

    left = _extend(model, intensity, lo, -1.0)
    psi_branch = _RiccatiBranch(model, intensity, left, hi, float(_local_rates(model, intensity, left)[1]), tol)

    right = _extend(model, intensity, hi, +1.0)
    for attempt in range(retries + 1):
        phi_branch = _RiccatiBranch(model, intensity, right, left, float(_local_rates(model, intensity, right)[0]), tol)
        if np.all(phi_branch.rates(samples) < 0) and np.all(psi_branch.rates(samples) > 0):
            break
        log.debug('Growing mode contaminates phi with far point %r, retrying', right)
        right = hi + 2.0 * (right - hi)
    else:
        raise FundamentalSolutionError('phi is not decreasing on [{!r}, {!r}]'.format(lo, hi))

    def log_phi(x):
        return phi_branch.state(x)[0]

    def log_psi(x):
        return psi_branch.state(x)[0]

    return FundamentalPair(model, intensity, log_phi, phi_branch.rates, log_psi, psi_branch.rates, ODE_NUMERIC)

