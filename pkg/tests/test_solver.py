import numpy as np
import pytest

from ergodicimpulse import solver
from ergodicimpulse.diffusions import pi_mu
from ergodicimpulse.exceptions import InvalidValue, SolverError
from ergodicimpulse.fundamental import FundamentalPair, build_pair
from ergodicimpulse.presets import get_preset, preset_config
from ergodicimpulse.quadrature import integrate_from_lower, integrate_upper_tail
from ergodicimpulse.solver import (
    H, L, StationaryDensity, beta_below, find_x_hat, find_x_tilde, g_hat, i_function, lambda_sweep, policy_cost,
    residual_P, solve_threshold,
)

from .conftest import random_specs, solved


published = [
    (name, intensity, expected)
    for name in ('verhulst', 'ou')
    for intensity, expected in get_preset(name).published.items()
]


@pytest.mark.parametrize('name,intensity,expected', published)
def test_published_thresholds(name, intensity, expected):
    _, _, result = solved(name, intensity)
    assert result.y_star == pytest.approx(expected, abs=0.005)
    assert result.bracket_ok
    assert result.x_tilde < result.y_star < result.x_hat


@pytest.mark.parametrize('name', ['verhulst', 'ou'])
def test_singular_thresholds(name):
    spec = preset_config(name, intensity=1).problem_spec()
    assert find_x_hat(spec) == pytest.approx(get_preset(name).singular, abs=0.005)


def test_verhulst_reference_points(verhulst_spec):
    assert verhulst_spec.x_star == pytest.approx(0.495, abs=5e-4)
    assert find_x_hat(verhulst_spec) == pytest.approx(0.743, abs=5e-4)


@pytest.mark.parametrize('name,intensity', [('verhulst', 100.0), ('ou', 10.0)])
def test_solution_quality(name, intensity):
    spec, pair, result = solved(name, intensity)
    assert abs(result.residual_P) <= 1e-8
    assert result.diagnostics['beta_consistent']
    assert abs(result.beta_below - result.beta_above) <= 1e-6 * abs(result.beta)
    assert result.singular_threshold == result.x_hat
    assert result.intensity == intensity

    assert H(spec, result.x_hat) == pytest.approx(0.0, abs=1e-8)
    assert L(spec, pair, result.x_tilde) == pytest.approx(0.0, abs=1e-8 * max(1.0, abs(pair.phi(result.x_tilde))))


@pytest.mark.parametrize('name,intensity', [('verhulst', 100.0), ('ou', 10.0)])
def test_residual_changes_sign_once_at_the_threshold(name, intensity):
    spec, pair, result = solved(name, intensity)
    below = np.linspace(result.x_tilde, result.y_star, 7)[1:-1]
    above = np.linspace(result.y_star, result.x_hat, 7)[1:-1]
    assert all(residual_P(spec, pair, x) < 0 for x in below)
    assert all(residual_P(spec, pair, x) > 0 for x in above)


def test_auxiliary_functions_change_sign_at_their_roots(ou_spec):
    pair = build_pair(ou_spec)
    x_hat = find_x_hat(ou_spec)
    x_tilde = find_x_tilde(ou_spec, pair)
    assert x_tilde < ou_spec.x_star < x_hat
    assert H(ou_spec, x_hat - 0.1) > 0 > H(ou_spec, x_hat + 0.1)
    assert L(ou_spec, pair, x_tilde - 0.1) < 0 < L(ou_spec, pair, x_tilde + 0.1)


@pytest.mark.parametrize('spec', random_specs(), ids=repr)
def test_random_specs(spec):
    pair = build_pair(spec)
    result = solve_threshold(spec, pair)
    assert result.bracket_ok
    assert result.diagnostics['beta_consistent']
    assert abs(result.residual_P) <= 1e-8

    # the threshold minimizes the long-run cost over threshold policies
    best = policy_cost(spec, pair, result.y_star)
    assert best == pytest.approx(result.beta, rel=1e-6, abs=1e-9)
    for shift in (-0.1, 0.1):
        y = result.y_star + shift * max(1.0, abs(result.y_star))
        if spec.model.is_interior(y):
            assert policy_cost(spec, pair, y) >= best - 1e-9


def test_beta_is_the_stationary_average_of_pi_mu():
    spec, pair, result = solved('ou', 10.0)
    density = StationaryDensity(spec, pair, result.y_star)
    assert 0 < density.probability_below < 1

    y = result.y_star
    mass = (
        integrate_from_lower(density, spec.model.lower, y)
        + integrate_upper_tail(density, y, decay_hint=abs(pair.dlog_phi(y)))
    )
    assert mass == pytest.approx(1.0, rel=1e-8)

    average = (
        integrate_from_lower(lambda z: pi_mu(spec, z) * density(z), spec.model.lower, y)
        + integrate_upper_tail(lambda z: pi_mu(spec, z) * density(z), y, decay_hint=abs(pair.dlog_phi(y)))
    )
    assert average == pytest.approx(result.beta, rel=1e-6)
    assert density.expectation(lambda z: pi_mu(spec, z)) == pytest.approx(average, rel=1e-8)
    assert density.expectation(np.ones_like) == pytest.approx(1.0, rel=1e-9)


def test_beta_below_lies_between_extreme_values_of_pi_mu():
    spec, _, result = solved('verhulst', 100.0)
    value = beta_below(spec, result.y_star)
    assert pi_mu(spec, spec.x_star) < value < 0


def test_sweep_is_monotone_and_approaches_the_singular_threshold():
    spec = preset_config('verhulst').problem_spec()
    sweep = lambda_sweep(spec, [5, 10, 50, 100, 1000], jobs=2)

    assert len(sweep) == 5
    assert sweep.monotone
    assert sweep.y_singular == pytest.approx(0.743, abs=0.005)
    thresholds = sweep.thresholds
    assert thresholds == sorted(thresholds)
    assert all(gap > 0 for gap in sweep.gaps)
    assert sweep.gaps[-1] < sweep.gaps[0]
    assert sweep.gaps[-1] <= 0.02

    corrections = [abs(entry.g_hat) for entry in sweep]
    assert corrections[-1] < corrections[0]

    rows = list(sweep.rows())
    assert list(rows[0]) == list(sweep.csv_header)
    assert all(row['status'] == 'ok' for row in rows)


def test_sweep_of_a_mean_reverting_model_is_a_soft_check():
    spec = preset_config('ou').problem_spec()
    sweep = lambda_sweep(spec, get_preset('ou').values['intensities'])
    assert sweep.soft
    assert sweep.monotone
    thresholds = sweep.thresholds
    assert all(b > a for a, b in zip(thresholds, thresholds[1:]))
    assert all(t < sweep.y_singular for t in thresholds)


def test_sweep_records_failures_and_continues(monkeypatch):
    real_solve = solver.solve_threshold

    def flaky(spec, pair=None, x_hat=None):
        if spec.intensity == 7.0:
            raise SolverError('P has the same sign at both ends of the bracket')
        return real_solve(spec, pair, x_hat=x_hat)

    monkeypatch.setattr(solver, 'solve_threshold', flaky)
    spec = preset_config('ou').problem_spec()
    sweep = lambda_sweep(spec, [7, 10])

    assert sweep.results[0] is None
    assert sweep.results[1] is not None
    rows = list(sweep.rows())
    assert rows[0]['status'].startswith('error: P has the same sign')
    assert rows[0]['y_star'] is None
    assert rows[1]['status'] == 'ok'


def test_empty_sweep():
    sweep = lambda_sweep(preset_config('ou').problem_spec(), [])
    assert len(sweep) == 0
    assert sweep.monotone
    assert list(sweep.rows()) == []


@pytest.mark.parametrize('bad', [0, -1.0, float('nan')])
def test_sweep_rejects_non_positive_rates(bad):
    with pytest.raises(InvalidValue) as exc_info:
        lambda_sweep(preset_config('ou').problem_spec(), [1.0, bad])
    assert exc_info.value.path == 'intensities'


def test_g_hat_at_the_singular_threshold_shrinks_with_the_rate():
    values = []
    for intensity in (10.0, 100.0, 1000.0):
        spec = preset_config('ou', intensity=intensity).problem_spec()
        pair = build_pair(spec)
        values.append(abs(g_hat(spec, pair, find_x_hat(spec))))
    assert values[0] > values[1] > values[2]


def test_result_as_dict():
    _, _, result = solved('ou', 10.0)
    payload = result.as_dict()
    assert list(payload)[:4] == ['intensity', 'x_tilde', 'x_hat', 'y_star']
    assert isinstance(payload['beta'], float)
    assert payload['diagnostics']['provenance'] == 'closed_form'


@pytest.mark.parametrize('name,intensity', [('verhulst', 100.0), ('ou', 10.0)])
def test_auxiliary_functions_change_sign_once_on_a_grid(name, intensity, grid):
    spec, pair, result = solved(name, intensity)
    points = grid(spec, n=50)
    assert result.x_tilde < spec.x_star < result.x_hat

    l_signs = np.sign([L(spec, pair, x) for x in points])
    assert np.all(l_signs[points < result.x_tilde] < 0)
    assert np.all(l_signs[points > result.x_tilde] > 0)
    assert np.count_nonzero(np.diff(l_signs)) == 1

    h_signs = np.sign([H(spec, x) for x in points])
    assert np.all(h_signs[points < result.x_hat] > 0)
    assert np.all(h_signs[points > result.x_hat] < 0)
    assert np.count_nonzero(np.diff(h_signs)) == 1


@pytest.mark.parametrize('name', ['verhulst', 'ou'])
def test_i_function_is_smallest_at_the_singular_threshold(name):
    spec = preset_config(name, intensity=10).problem_spec()
    x_hat = find_x_hat(spec)
    step = 0.05 * max(1.0, abs(x_hat))
    values = [i_function(spec, x_hat + k * step) for k in range(-4, 5)]
    steps = np.diff(values)
    assert np.all(steps[:4] < 0)
    assert np.all(steps[4:] > 0)


def test_threshold_does_not_depend_on_the_bracket_or_the_normalization():
    spec, pair, result = solved('ou', 10.0)

    wider = solve_threshold(spec, pair, x_hat=result.x_hat + 0.2)
    assert wider.y_star == pytest.approx(result.y_star, abs=1e-8)

    rescaled = FundamentalPair(
        pair.model, pair.intensity, pair._log_phi, pair._dlog_phi, pair._log_psi, pair._dlog_psi,
        pair.provenance, x_ref=1.7,
    )
    assert rescaled.phi(0.0) > 1.0
    assert solve_threshold(spec, rescaled, x_hat=result.x_hat).y_star == pytest.approx(result.y_star, abs=1e-8)
