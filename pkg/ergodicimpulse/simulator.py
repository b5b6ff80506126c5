"""
Monte Carlo evaluation of threshold policies.

Between signals the state follows an Euler-Maruyama path; at every step a signal
arrives with probability ``1 - exp(-lambda dt)``, checked after the diffusion step.
On a signal with the state above the threshold ``y`` the controller pays
``gamma (X - y)`` and moves the state to ``y``.

Every replicate draws from its own Philox stream keyed by ``(seed, replicate)``,
so results do not depend on how replicates are split between workers. With
common random numbers all thresholds of one comparison share those streams.
"""
import collections
import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .exceptions import InvalidValue, ModelEvaluationError, NumericalError
from .fundamental import build_pair
from .solver import policy_cost


log = logging.getLogger(__name__)


#: Steps drawn per random block.
BLOCK = 4096

#: Lower clamp for models on the positive half-line.
CLAMP = 1e-12


class PolicySpec(collections.namedtuple('PolicySpec', 'threshold')):
    """Push the state to ``threshold`` at a signal whenever it is above it."""

    def validated(self, spec):
        y = float(self.threshold)
        if not (math.isfinite(y) and spec.model.is_interior(y)):
            raise InvalidValue('policy.threshold', self.threshold, 'must be interior to the state space')
        return PolicySpec(y)


class SimConfig(object):
    """
    Settings of a Monte Carlo run.

    Args:
        time_step: Euler step ``dt``.
        horizon: simulated time ``T`` per replicate.
        burn_in: discarded initial time; ``5%`` of the horizon by default.
        replicates: number of independent replicates.
        seed: non-negative integer below ``2**64``.
        initial_state: starting point; the policy threshold when ``None``.
        common_random_numbers: share draws across the thresholds of a comparison.
        intensity: overrides the signal rate of the problem; ``0`` never controls.
        max_clamps: a replicate clamped more often than this is marked invalid.
        jobs: worker threads over replicate chunks; the number of CPUs when ``None``.
    """

    def __init__(self, time_step=1e-3, horizon=1e4, burn_in=None, replicates=32, seed=0,
                 initial_state=None, common_random_numbers=True, intensity=None, max_clamps=100, jobs=None):
        self.time_step = _positive('simulation.time_step', time_step)
        self.horizon = _positive('simulation.horizon', horizon)
        self.burn_in = 0.05 * self.horizon if burn_in is None else float(burn_in)
        if not (0 <= self.burn_in < self.horizon):
            raise InvalidValue('simulation.burn_in', burn_in, 'must be non-negative and below the horizon')
        if int(replicates) != replicates or replicates < 1:
            raise InvalidValue('simulation.replicates', replicates, 'must be a positive integer')
        self.replicates = int(replicates)
        if int(seed) != seed or not 0 <= seed < 2 ** 64:
            raise InvalidValue('simulation.seed', seed, 'must be an unsigned 64-bit integer')
        self.seed = int(seed)
        self.initial_state = None if initial_state is None else float(initial_state)
        self.common_random_numbers = bool(common_random_numbers)
        if intensity is not None and not (math.isfinite(intensity) and intensity >= 0):
            raise InvalidValue('simulation.intensity', intensity, 'must be a non-negative finite number')
        self.intensity = intensity
        self.max_clamps = int(max_clamps)
        self.jobs = jobs

    def __repr__(self):
        return '<{} dt={!r} T={!r} replicates={!r} seed={!r}>'.format(
            self.__class__.__name__, self.time_step, self.horizon, self.replicates, self.seed)

    @property
    def steps(self):
        return int(round(self.horizon / self.time_step))

    @property
    def burn_in_steps(self):
        return int(round(self.burn_in / self.time_step))

    @property
    def averaging_window(self):
        """``(start, end)`` of the counted steps; costs are averaged over ``end - start``."""
        return self.burn_in_steps * self.time_step, self.steps * self.time_step

    def replace(self, **changes):
        kwargs = dict(
            time_step=self.time_step, horizon=self.horizon, burn_in=self.burn_in, replicates=self.replicates,
            seed=self.seed, initial_state=self.initial_state, common_random_numbers=self.common_random_numbers,
            intensity=self.intensity, max_clamps=self.max_clamps, jobs=self.jobs,
        )
        kwargs.update(changes)
        return SimConfig(**kwargs)

    def describe(self):
        return collections.OrderedDict([
            ('time_step', self.time_step),
            ('horizon', self.horizon),
            ('burn_in', self.burn_in),
            ('replicates', self.replicates),
            ('seed', self.seed),
            ('initial_state', self.initial_state),
            ('common_random_numbers', self.common_random_numbers),
            ('intensity', self.intensity),
        ])


def _positive(path, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise InvalidValue(path, value, 'must be a positive finite number')
    return value


def _stream(seed, *key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed] + list(key))))


# Per-replicate accumulators of one engine run, each of shape (thresholds, replicates).
_Paths = collections.namedtuple('_Paths', 'running control impulse events arrivals clamps')


def _engine(spec, thresholds, config, intensity, streams):
    """
    Simulates every threshold in ``thresholds`` against every stream in ``streams``.
    The state has shape ``(thresholds, replicates)``; draws are shared along the first axis.
    """
    model, cost = spec.model, spec.cost
    drift, volatility = model.coefficients()
    running_cost = cost.unchecked_running_cost
    gamma = spec.gamma
    dt = config.time_step
    root_dt = math.sqrt(dt)
    p = -math.expm1(-intensity * dt)

    y = np.asarray(thresholds, dtype=float)[:, None]
    k, r = len(thresholds), len(streams)
    start = y if config.initial_state is None else np.full((k, 1), config.initial_state)
    x = np.broadcast_to(start, (k, r)).astype(float)

    running = np.zeros((k, r))
    control = np.zeros((k, r))
    impulse = np.zeros((k, r))
    events = np.zeros((k, r), dtype=np.int64)
    arrivals = np.zeros(r, dtype=np.int64)
    clamps = np.zeros((k, r), dtype=np.int64)

    total, first_counted = config.steps, config.burn_in_steps
    done = 0
    while done < total:
        size = min(BLOCK, total - done)
        noise = np.stack([s.standard_normal(size) for s in streams], axis=1) * root_dt
        signals = np.stack([s.random(size) for s in streams], axis=1) < p
        any_signal = signals.any(axis=1)
        history = np.empty((size, k, r))

        for i in range(size):
            history[i] = x
            x = x + drift(x) * dt + volatility(x) * noise[i]
            if model.on_half_line and x.min() < CLAMP:
                low = x < CLAMP
                clamps += low
                x = np.where(low, CLAMP, x)
            if any_signal[i]:
                jump = np.where(signals[i], np.maximum(x - y, 0.0), 0.0)
                if done + i >= first_counted:
                    arrivals += signals[i]
                    impulse += jump
                    control += gamma * jump
                    events += jump > 0
                x = x - jump

        if not np.all(np.isfinite(x)):
            bad = x[~np.isfinite(x)]
            raise ModelEvaluationError(float(bad.flat[0]), 'non-finite simulated state')

        counted = max(0, first_counted - done)
        if counted < size:
            block = np.zeros((k, r))
            # step by step, so each replicate's sum does not depend on the chunk width
            for row in running_cost(history[counted:]):
                block += row
            running += block * dt
        done += size

    return _Paths(running, control, impulse, events, arrivals, clamps)


def _chunks(n, jobs):
    if jobs is None:
        jobs = os.cpu_count() or 1
    jobs = max(1, min(n, jobs))
    bounds = np.linspace(0, n, jobs + 1).astype(int)
    return [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _run(spec, thresholds, config, intensity, key_extra=()):
    """Runs the engine over all replicates, in chunks, and stacks the chunks in replicate order."""
    def run_chunk(replicates):
        streams = [_stream(config.seed, r, *key_extra) for r in replicates]
        return _engine(spec, thresholds, config, intensity, streams)

    chunks = _chunks(config.replicates, config.jobs)
    if len(chunks) == 1:
        parts = [run_chunk(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as executor:
            parts = list(executor.map(run_chunk, chunks))
    return _Paths(*(np.concatenate(field, axis=-1) for field in zip(*parts)))


class SimReport(object):
    """
    Empirical long-run average cost of one threshold policy.

    The estimate averages over the counted steps from ``burn_in`` to ``horizon`` and is a finite-horizon
    proxy of the ergodic criterion; ``finite_horizon`` records the averaging window.
    Statistics are over valid replicates only.
    """

    fields = ('threshold', 'intensity', 'mean', 'std_error', 'ci95', 'control_events', 'average_impulse',
              'per_replicate_cost')

    def __init__(self, threshold, intensity, config, per_replicate_cost, valid, extras):
        self.threshold = threshold
        self.intensity = intensity
        self.config = config
        self.per_replicate_cost = [float(v) for v in per_replicate_cost]
        self.valid = [bool(v) for v in valid]
        self.extras = extras

        costs = np.asarray(self.per_replicate_cost)[np.asarray(self.valid, dtype=bool)]
        n = len(costs)
        if n == 0:
            raise NumericalError('every replicate was marked invalid (state left the domain too often)')
        self.mean = float(np.mean(costs))
        self.std_error = float(np.std(costs, ddof=1) / math.sqrt(n)) if n > 1 else float('inf')
        self.ci95 = (self.mean - 1.96 * self.std_error, self.mean + 1.96 * self.std_error)

        events = np.asarray(extras['events'])[self.valid]
        impulses = np.asarray(extras['impulse'])[self.valid]
        self.control_events = int(np.sum(events))
        self.average_impulse = float(np.sum(impulses) / self.control_events) if self.control_events else 0.0

        self.analytic_beta = None
        self.z_score = None

    def __repr__(self):
        return '<{} y={!r} mean={!r} +- {!r}>'.format(self.__class__.__name__, self.threshold, self.mean, self.std_error)

    @property
    def invalid_replicates(self):
        return [i for i, ok in enumerate(self.valid) if not ok]

    @property
    def finite_horizon(self):
        return 'average over [{!r}, {!r}]'.format(*self.config.averaging_window)

    def with_reference(self, beta):
        self.analytic_beta = float(beta)
        self.z_score = (self.mean - self.analytic_beta) / self.std_error
        return self

    def as_dict(self):
        data = collections.OrderedDict((name, getattr(self, name)) for name in self.fields)
        data['ci95'] = list(self.ci95)
        data['invalid_replicates'] = self.invalid_replicates
        data['finite_horizon'] = self.finite_horizon
        for name in ('arrivals', 'events', 'impulse', 'control_cost', 'clamps'):
            data[name] = [v.item() if hasattr(v, 'item') else v for v in self.extras[name]]
        if self.analytic_beta is not None:
            data['analytic_beta'] = self.analytic_beta
            data['z_score'] = self.z_score
        data['config'] = self.config.describe()
        return data

    csv_header = ('replicate', 'cost', 'valid', 'arrivals', 'events', 'impulse', 'control_cost', 'clamps')

    def csv_rows(self):
        for i, cost in enumerate(self.per_replicate_cost):
            yield collections.OrderedDict([
                ('replicate', i),
                ('cost', cost),
                ('valid', self.valid[i]),
                ('arrivals', int(self.extras['arrivals'][i])),
                ('events', int(self.extras['events'][i])),
                ('impulse', float(self.extras['impulse'][i])),
                ('control_cost', float(self.extras['control_cost'][i])),
                ('clamps', int(self.extras['clamps'][i])),
            ])


def _intensity(spec, config):
    intensity = spec.intensity if config.intensity is None else float(config.intensity)
    if intensity * config.time_step > 0.1:
        warnings.warn(
            'time step {!r} is not small against 1/lambda = {!r}'.format(config.time_step, 1.0 / intensity),
            RuntimeWarning,
        )
    return intensity


def _reports(spec, thresholds, config, intensity, paths):
    start, end = config.averaging_window
    window = end - start
    reports = []
    for j, y in enumerate(thresholds):
        clamps = paths.clamps[j]
        if np.any(clamps):
            warnings.warn('{} clamps at the lower boundary for threshold {!r}'.format(int(np.sum(clamps)), y),
                          RuntimeWarning)
        extras = collections.OrderedDict([
            ('arrivals', paths.arrivals.tolist()),
            ('events', paths.events[j].tolist()),
            ('impulse', paths.impulse[j].tolist()),
            ('control_cost', paths.control[j].tolist()),
            ('clamps', clamps.tolist()),
        ])
        costs = (paths.running[j] + paths.control[j]) / window
        reports.append(SimReport(y, intensity, config, costs, clamps <= config.max_clamps, extras))
    return reports


def _simulate(spec, thresholds, config):
    thresholds = [PolicySpec(y).validated(spec).threshold for y in thresholds]
    intensity = _intensity(spec, config)
    if config.common_random_numbers or len(thresholds) == 1:
        paths = _run(spec, thresholds, config, intensity)
        return _reports(spec, thresholds, config, intensity, paths)
    reports = []
    for j, y in enumerate(thresholds):
        paths = _run(spec, [y], config, intensity, key_extra=(j + 1,))
        reports.extend(_reports(spec, [y], config, intensity, paths))
    return reports


def simulate_policy(spec, policy, config):
    """
    Returns:
        SimReport
    """
    if not isinstance(policy, PolicySpec):
        policy = PolicySpec(policy)
    report, = _simulate(spec, [policy.threshold], config)
    log.debug('y=%r: mean cost %r +- %r', report.threshold, report.mean, report.std_error)
    return report


def estimate_beta(spec, result, config):
    """
    Simulates the optimal policy of ``result`` and attaches the analytic ``beta`` and
    the z-score of the discrepancy.
    """
    return simulate_policy(spec, PolicySpec(result.y_star), config).with_reference(result.beta)


class PolicyComparison(object):
    """
    Reports of several thresholds on common draws, with differences to the best one.

    A threshold is ``inconclusive`` when its mean is within two standard errors of the
    best mean; with common random numbers the standard error is that of the
    per-replicate differences.
    """

    csv_header = ('threshold', 'mean', 'std_error', 'difference', 'difference_std_error', 'inconclusive',
                  'policy_cost')

    def __init__(self, reports, paired, policy_costs=None):
        self.reports = list(reports)
        self.paired = paired
        self.policy_costs = policy_costs or [None] * len(self.reports)
        self.best = min(self.reports, key=lambda rep: rep.mean)

    def __iter__(self):
        return iter(self.reports)

    def __len__(self):
        return len(self.reports)

    def difference(self, report):
        """Mean cost of ``report`` minus the best mean and its standard error."""
        best = self.best
        if report is best:
            return 0.0, 0.0
        if self.paired:
            both = np.asarray(report.valid) & np.asarray(best.valid)
            diffs = np.asarray(report.per_replicate_cost)[both] - np.asarray(best.per_replicate_cost)[both]
            if len(diffs) < 2:
                return float(np.mean(diffs)) if len(diffs) else float('nan'), float('inf')
            return float(np.mean(diffs)), float(np.std(diffs, ddof=1) / math.sqrt(len(diffs)))
        return report.mean - best.mean, math.hypot(report.std_error, best.std_error)

    def rows(self):
        for report, analytic in zip(self.reports, self.policy_costs):
            difference, error = self.difference(report)
            yield collections.OrderedDict([
                ('threshold', report.threshold),
                ('mean', report.mean),
                ('std_error', report.std_error),
                ('difference', difference),
                ('difference_std_error', error),
                ('inconclusive', report is not self.best and difference <= 2 * error),
                ('policy_cost', analytic),
            ])

    @property
    def inconclusive(self):
        return any(row['inconclusive'] for row in self.rows())


def compare_policies(spec, thresholds, config, analytic=True):
    """
    Simulates each threshold and tabulates the costs. With ``analytic=True`` the
    exact long-run cost of each threshold policy is added where it can be computed.

    Returns:
        PolicyComparison
    """
    reports = _simulate(spec, thresholds, config)
    costs = None
    if analytic and config.intensity is None:
        try:
            pair = build_pair(spec)
            costs = [policy_cost(spec, pair, rep.threshold) for rep in reports]
        except NumericalError as e:
            log.warning('analytic policy costs unavailable: %s', e)
    return PolicyComparison(reports, paired=config.common_random_numbers, policy_costs=costs)
