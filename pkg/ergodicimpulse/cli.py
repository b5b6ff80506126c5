"""
Command-line front-end.

Exit codes: ``0`` success, ``2`` numerical failure, ``3`` configuration or
pre-solve validation failure. Messages go to stderr.
"""
import collections
import csv
import io
import json
import logging
import math
import os.path
import sys

import click
import numpy as np

from .assumptions import validate_assumptions
from .click_ext import ClickExtension
from .exceptions import ConfigError, NumericalError
from .fundamental import build_pair
from .presets import get_preset, preset_config
from .run_config import RunConfig
from .simulator import compare_policies, estimate_beta
from .solver import SweepResult, lambda_sweep, solve_threshold
from .value_function import build_value_function, variational_check


log = logging.getLogger(__name__)

EXIT_NUMERICAL = 2
EXIT_CONFIG = 3

run_options = ClickExtension(RunConfig)


class _ExitCodeGroup(click.Group):
    def invoke(self, ctx):
        try:
            return super(_ExitCodeGroup, self).invoke(ctx)
        except ConfigError as e:
            click.echo('configuration error: {}'.format(e), err=True)
            ctx.exit(EXIT_CONFIG)
        except NumericalError as e:
            click.echo('numerical error: {!r}'.format(e), err=True)
            ctx.exit(EXIT_NUMERICAL)


def _common_options(command):
    for decorator in reversed([
        run_options.source_option('--config', '-c', 'config', help='Run configuration (.json, .yaml).'),
        run_options.option('--output', '-o', path='output.directory', help='Directory for result files.'),
        run_options.option('--format', 'output_format', path='output.format',
                           type=click.Choice(['json', 'csv', 'both']), help='Result file format.'),
        click.option('--jobs', '-j', type=click.IntRange(min=1), default=None, help='Worker threads.'),
    ]):
        command = decorator(command)
    return command


def _formats(config):
    chosen = config.output.format.value
    return ('json', 'csv') if chosen == 'both' else (chosen,)


def _path(config, filename):
    directory = config.output.directory.value
    if not os.path.isdir(directory):
        os.makedirs(directory)
    return os.path.join(directory, filename)


def _plain(value):
    if isinstance(value, dict):
        return collections.OrderedDict((k, _plain(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def format_float(value):
    """
    Floats in result files carry 17 significant digits and keep a decimal point.

    Examples::

        >>> format_float(0.1)
        '0.10000000000000001'
        >>> format_float(10.0)
        '10.0'
    """
    text = '{:.17g}'.format(value)
    return text if any(c in text for c in '.eni') else text + '.0'


class _ResultEncoder(json.JSONEncoder):
    """JSON encoder writing floats through :func:`format_float`."""

    def iterencode(self, o, _one_shot=False):
        def floatstr(value):
            if math.isnan(value):
                return 'NaN'
            if math.isinf(value):
                return 'Infinity' if value > 0 else '-Infinity'
            return format_float(value)

        markers = {} if self.check_circular else None
        encode = json.encoder._make_iterencode(
            markers, self.default, json.encoder.encode_basestring, self.indent, floatstr,
            self.key_separator, self.item_separator, self.sort_keys, self.skipkeys, _one_shot,
        )
        return encode(o, 0)


def _cell(value):
    if value is None:
        return ''
    value = _plain(value)
    if isinstance(value, float):
        return format_float(value)
    return value


def write_json(path, data):
    with io.open(path, 'w', encoding='utf-8') as f:
        f.write(json.dumps(_plain(data), indent=2, cls=_ResultEncoder))
        f.write('\n')
    log.debug('wrote %s', path)


def write_csv(path, header, rows):
    with io.open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(row[k]) for k in header])
    log.debug('wrote %s', path)


def _fmt(value):
    return '-' if value is None else '{:.3f}'.format(value)


def _checked_spec(config, skip_checks, intensity=None):
    spec = config.problem_spec(intensity=intensity)
    if not skip_checks:
        report = validate_assumptions(spec)
        if not report.passed:
            for check in report.failures:
                click.echo('assumption check {} failed: {}'.format(check.name, check.detail), err=True)
            raise click.exceptions.Exit(EXIT_CONFIG)
    return spec


@click.group(cls=_ExitCodeGroup)
@click.option('--verbose', '-v', is_flag=True, help='Debug logging on stderr.')
def cli(verbose):
    """Optimal thresholds for ergodic impulse control at Poisson signal times."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    root = logging.getLogger('ergodicimpulse')
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)


@cli.command()
@_common_options
@run_options.option('--intensity', '-l', path='intensity', help='Signal rate lambda.')
@click.option('--skip-checks', is_flag=True, help='Do not run assumption checks before solving.')
def solve(config, output, output_format, jobs, intensity, skip_checks):
    """Solve for the optimal threshold y* and the minimal average cost."""
    spec = _checked_spec(config, skip_checks)
    result = solve_threshold(spec, build_pair(spec))

    formats = _formats(config)
    if 'json' in formats:
        write_json(_path(config, 'solve.json'), result.as_dict())
    if 'csv' in formats:
        row = result.as_dict()
        header = [k for k in row if k != 'diagnostics']
        write_csv(_path(config, 'solve.csv'), header, [row])

    click.echo('lambda={} y*={} beta={} x_tilde={} x_hat={} y_singular={} residual={:.2e}'.format(
        result.intensity, _fmt(result.y_star), _fmt(result.beta), _fmt(result.x_tilde), _fmt(result.x_hat),
        _fmt(result.singular_threshold), result.residual_P,
    ))


def _sweep_rows_table(sweep):
    lines = ['{:>10} {:>8} {:>10} {:>8}  {}'.format('lambda', 'y*', 'beta', 'gap', 'status')]
    for row in sweep.rows():
        lines.append('{:>10g} {:>8} {:>10} {:>8}  {}'.format(
            row['lambda'], _fmt(row['y_star']), _fmt(row['beta']), _fmt(row['gap']), row['status']))
    lines.append('singular threshold {}'.format(_fmt(sweep.y_singular)))
    return '\n'.join(lines)


@cli.command()
@_common_options
@click.option('--skip-checks', is_flag=True, help='Do not run assumption checks before solving.')
def sweep(config, output, output_format, jobs, skip_checks):
    """Solve at every rate of the configured intensities list."""
    lambdas = config.intensities.value or []
    if not lambdas:
        config.validate()
        write_csv(_path(config, 'sweep.csv'), SweepResult.csv_header, [])
        return

    spec = _checked_spec(config, skip_checks, intensity=lambdas[0] if config.intensity.value is None else None)
    result = lambda_sweep(spec, lambdas, jobs=jobs)

    write_csv(_path(config, 'sweep.csv'), SweepResult.csv_header, result.rows())
    if 'json' in _formats(config):
        write_json(_path(config, 'sweep.json'), collections.OrderedDict([
            ('rows', list(result.rows())),
            ('y_singular', result.y_singular),
            ('monotone', result.monotone),
            ('soft', result.soft),
        ]))
    click.echo(_sweep_rows_table(result))


@cli.command()
@_common_options
@run_options.option('--intensity', '-l', path='intensity', help='Signal rate lambda.')
@run_options.option('--seed', '-s', path='simulation.seed', help='Seed of the random streams.')
@click.option('--skip-checks', is_flag=True, help='Do not run assumption checks before solving.')
def simulate(config, output, output_format, jobs, intensity, seed, skip_checks):
    """
    Monte Carlo cost of threshold policies. Without configured thresholds the
    optimal policy is simulated and compared with the analytic beta.
    """
    spec = _checked_spec(config, skip_checks)
    sim = config.sim_config(jobs=jobs)
    thresholds = config['simulation.thresholds'].value or []
    formats = _formats(config)

    if not thresholds:
        result = solve_threshold(spec, build_pair(spec))
        report = estimate_beta(spec, result, sim)
        if 'json' in formats:
            write_json(_path(config, 'simulate.json'), report.as_dict())
        if 'csv' in formats:
            write_csv(_path(config, 'simulate.csv'), report.csv_header, report.csv_rows())
        click.echo('y*={} mean={:.6f} +- {:.6f} beta={:.6f} z={:.2f}'.format(
            _fmt(report.threshold), report.mean, report.std_error, report.analytic_beta, report.z_score))
        return

    comparison = compare_policies(spec, thresholds, sim)
    rows = list(comparison.rows())
    if 'json' in formats:
        write_json(_path(config, 'compare.json'), collections.OrderedDict([
            ('rows', rows),
            ('reports', [r.as_dict() for r in comparison]),
        ]))
    if 'csv' in formats:
        write_csv(_path(config, 'compare.csv'), comparison.csv_header, rows)
    for row in rows:
        click.echo('y={} mean={:.6f} +- {:.6f} diff={:.6f}{}'.format(
            _fmt(row['threshold']), row['mean'], row['std_error'], row['difference'],
            ' (inconclusive)' if row['inconclusive'] else ''))


def _check_grid(spec, y_star):
    if spec.model.on_half_line:
        return y_star * np.array([0.4, 0.6, 0.8, 0.95, 1.0, 1.05, 1.25, 1.5, 2.0])
    width = max(1.0, abs(y_star))
    return y_star + width * np.array([-1.0, -0.5, -0.2, -0.05, 0.0, 0.05, 0.25, 0.5, 1.0])


@cli.command()
@_common_options
@run_options.option('--intensity', '-l', path='intensity', help='Signal rate lambda.')
def validate(config, output, output_format, jobs, intensity):
    """
    Assumption checks and, when they pass, the variational inequality on a grid
    around y*. Failed checks are reported, not fatal.
    """
    spec = config.problem_spec()
    report = validate_assumptions(spec)
    rows = [collections.OrderedDict([('check', r['check']), ('status', r['status']), ('detail', r['detail'])])
            for r in report.as_rows()]

    variational = None
    if report.passed:
        pair = build_pair(spec)
        result = solve_threshold(spec, pair)
        vf = build_value_function(spec, pair, result)
        variational = variational_check(spec, vf, _check_grid(spec, result.y_star))
        for row in variational:
            rows.append(collections.OrderedDict([
                ('check', 'variational x={:.4f} ({})'.format(row.x, row.region)),
                ('status', 'pass' if row.sign_ok and row.residual_ok else 'fail'),
                ('detail', "W'-gamma={:.3e} residual={:.3e}".format(row.derivative_gap, row.residual)),
            ]))
    else:
        rows.append(collections.OrderedDict([
            ('check', 'variational'), ('status', 'skipped'), ('detail', 'assumption checks failed'),
        ]))

    formats = _formats(config)
    if 'json' in formats:
        write_json(_path(config, 'validate.json'), collections.OrderedDict([
            ('passed', report.passed and (variational is None or variational.passed)),
            ('checks', rows),
        ]))
    if 'csv' in formats:
        write_csv(_path(config, 'validate.csv'), ('check', 'status', 'detail'), rows)
    for row in rows:
        click.echo('{:<40} {:<7} {}'.format(row['check'], row['status'], row['detail']))


def table_rows(name, jobs=None):
    """Reproduction of a preset's published thresholds, one row per rate."""
    preset = get_preset(name)
    config = preset_config(name)
    spec = config.problem_spec()
    sweep = lambda_sweep(spec, list(preset.published), jobs=jobs)
    rows = []
    for entry in sweep:
        published = preset.published[entry.intensity]
        computed = entry.result.y_star if entry.result else None
        rows.append(collections.OrderedDict([
            ('lambda', entry.intensity),
            ('published', published),
            ('computed', computed),
            ('difference', None if computed is None else abs(computed - published)),
        ]))
    return rows, sweep.y_singular, preset.singular


@cli.command()
@click.argument('name')
@click.option('--jobs', '-j', type=click.IntRange(min=1), default=None, help='Worker threads.')
def table(name, jobs):
    """Reproduce the published thresholds of a worked example (verhulst or ou)."""
    rows, singular, published_singular = table_rows(name, jobs=jobs)
    click.echo('{:>8} {:>10} {:>10} {:>8}'.format('lambda', 'published', 'computed', '|diff|'))
    for row in rows:
        click.echo('{:>8g} {:>10} {:>10} {:>8}'.format(
            row['lambda'], _fmt(row['published']), _fmt(row['computed']), _fmt(row['difference'])))
    click.echo('{:>8} {:>10} {:>10} {:>8}'.format(
        'singular', _fmt(published_singular), _fmt(singular), _fmt(abs(singular - published_singular))))


def main():
    cli(prog_name='ergodicimpulse')


if __name__ == '__main__':
    main()
