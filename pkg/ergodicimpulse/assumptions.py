"""
Sampled checks of the standing assumptions on a :class:`.ProblemSpec`.

Every check samples finitely many points and is therefore a heuristic; a failed
check is a report entry, never an exception.
"""
import collections
import logging

import numpy as np

from .diffusions import log_scale_density, pi_mu, sample_grid, speed_density, speed_measure
from .exceptions import NumericalError
from .quadrature import integrate_from_lower


log = logging.getLogger(__name__)


Check = collections.namedtuple('Check', 'name passed detail heuristic')


class ValidationReport(object):
    """
    Ordered collection of :class:`Check` records.
    """

    def __init__(self, checks=None):
        self.checks = list(checks or ())

    def __iter__(self):
        return iter(self.checks)

    def __len__(self):
        return len(self.checks)

    def __getitem__(self, name):
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def __repr__(self):
        return '<{} {}>'.format(self.__class__.__name__, ', '.join(
            '{}={}'.format(c.name, 'pass' if c.passed else 'FAIL') for c in self.checks
        ))

    def add(self, name, passed, detail='', heuristic=True):
        self.checks.append(Check(name, bool(passed), detail, heuristic))

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def as_rows(self):
        return [
            collections.OrderedDict([
                ('check', c.name),
                ('status', 'pass' if c.passed else 'fail'),
                ('heuristic', c.heuristic),
                ('detail', c.detail),
            ])
            for c in self.checks
        ]


def _measure_points(model):
    if model.on_half_line:
        return model.scale_anchor * np.array([0.1, 0.5, 1.0, 2.0, 10.0])
    return model.scale_anchor + np.array([-10.0, -1.0, 0.0, 1.0, 10.0])


def _toward_lower(model):
    if model.on_half_line:
        return model.scale_anchor * 10.0 ** -np.arange(1, 9)
    return model.scale_anchor - 10.0 ** np.arange(0, 4)


def check_finite_speed_measure(spec, report):
    tol = spec.tolerances
    try:
        values = [speed_measure(spec.model, y, tol=tol.quad_tol, tail_tol=tol.tail_tol) for y in _measure_points(spec.model)]
    except NumericalError as e:
        report.add('finite_speed_measure', False, str(e))
        return
    finite = all(np.isfinite(v) and v > 0 for v in values)
    report.add('finite_speed_measure', finite, 'm(l, y) at {} sampled y'.format(len(values)))


def check_integrable_cost_near_lower(spec, report):
    tol = spec.tolerances
    y = spec.model.scale_anchor
    try:
        value = integrate_from_lower(
            lambda z: pi_mu(spec, z) * speed_density(spec.model, z),
            spec.model.lower, y, tol=tol.quad_tol, tail_tol=tol.tail_tol,
        )
    except NumericalError as e:
        report.add('integrable_pi_mu_near_lower', False, str(e))
        return
    report.add('integrable_pi_mu_near_lower', np.isfinite(value), 'int_l^{!r} pi_mu dm = {!r}'.format(y, value))


def check_scale_density_unbounded(spec, report):
    points = _toward_lower(spec.model)
    try:
        logs = np.array([log_scale_density(spec.model, x) for x in points])
    except NumericalError as e:
        report.add('scale_density_unbounded_at_lower', False, str(e))
        return
    increasing = np.all(np.diff(logs) > 0)
    grown = logs[-1] - logs[0] >= 10.0
    report.add(
        'scale_density_unbounded_at_lower', increasing and grown,
        'log S\' from {:.4g} to {:.4g} along {} points toward l'.format(logs[0], logs[-1], len(points)),
    )


def check_unimodal_pi_mu(spec, report):
    try:
        x_star = spec.x_star
    except NumericalError as e:
        report.add('unimodal_pi_mu', False, str(e))
        return

    grid = sample_grid(spec.model)
    values = pi_mu(spec, grid)
    slack = 1e-12 * np.maximum(1.0, np.abs(values[:-1]))
    steps = np.diff(values)
    left = grid[1:] <= x_star
    right = grid[:-1] >= x_star
    decreasing = np.all(steps[left] <= slack[left])
    increasing = np.all(steps[right] >= -slack[right])
    tail_positive = values[-1] > 0

    problems = []
    if not decreasing:
        problems.append('pi_mu increases somewhere below x*')
    if not increasing:
        problems.append('pi_mu decreases somewhere above x*')
    if not tail_positive:
        problems.append('pi_mu({:.4g}) = {:.4g} is not positive'.format(grid[-1], values[-1]))
    report.add(
        'unimodal_pi_mu', not problems,
        '; '.join(problems) or 'x* = {!r}, pi_mu(x*) = {!r}'.format(x_star, pi_mu(spec, x_star)),
    )


def check_non_negative_cost(spec, report):
    grid = sample_grid(spec.model)
    values = spec.cost.running_cost(grid)
    worst = int(np.argmin(values))
    report.add(
        'non_negative_running_cost', values[worst] >= 0,
        'min pi = {!r} at x = {!r}'.format(float(values[worst]), float(grid[worst])),
    )


_checks = (
    check_finite_speed_measure,
    check_integrable_cost_near_lower,
    check_scale_density_unbounded,
    check_unimodal_pi_mu,
    check_non_negative_cost,
)


def validate_assumptions(spec):
    """
    Runs every sampled assumption check on ``spec``.

    Returns:
        ValidationReport
    """
    report = ValidationReport()
    for check in _checks:
        check(spec, report)
    for failure in report.failures:
        log.info('Assumption check %s failed: %s', failure.name, failure.detail)
    return report
