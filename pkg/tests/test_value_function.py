import logging

import numpy as np
import pytest

from ergodicimpulse.solver import find_x_tilde
from ergodicimpulse.value_function import (
    ValueFunction, build_value_function, growth_condition, j_function, resolvent, resolvent_prime, variational_check,
)

from .conftest import solved


@pytest.fixture(params=[('verhulst', 100.0), ('ou', 10.0)], ids=lambda p: '{}-{:g}'.format(*p))
def instance(request):
    spec, pair, result = solved(*request.param)
    return spec, pair, result, build_value_function(spec, pair, result)


def away_from(grid, y, margin=0.01):
    return grid[np.abs(grid - y) > margin * max(1.0, abs(y))]


def test_resolvent_of_constants_and_linear_functions():
    spec, pair, _ = solved('ou', 10.0)
    for x in (-1.0, 0.0, 0.3, 2.0):
        assert resolvent(spec, pair, np.ones_like, x) * spec.intensity == pytest.approx(1.0, rel=1e-9)
        assert resolvent_prime(spec, pair, np.ones_like, x) == pytest.approx(0.0, abs=1e-9)

    # E_x X_s = x exp(-b s) for the mean-reverting model, so R(id)(x) = x / (lambda + b)
    identity = lambda z: z  # noqa: E731
    assert resolvent(spec, pair, identity, 0.7) == pytest.approx(0.7 / 11.0, rel=1e-8)
    assert resolvent_prime(spec, pair, identity, 0.7) == pytest.approx(1.0 / 11.0, rel=1e-8)


def test_value_function_is_normalized_and_smooth_at_the_threshold(instance):
    spec, pair, result, vf = instance
    y = result.y_star
    assert vf(y) == pytest.approx(0.0, abs=1e-12)
    assert vf.below_value(y) == pytest.approx(0.0, abs=1e-12)
    assert vf.above_value(y) == pytest.approx(0.0, abs=1e-12)

    scale = max(1.0, abs(spec.gamma))
    assert vf.below_derivative(y) == pytest.approx(spec.gamma, abs=1e-9 * scale)
    assert vf.above_derivative(y) == pytest.approx(spec.gamma, abs=1e-9 * scale)


def test_value_function_is_continuous(instance):
    _, _, result, vf = instance
    y = result.y_star
    h = 1e-6 * max(1.0, abs(y))
    assert vf(y - h) == pytest.approx(vf(y + h), abs=1e-5)


@pytest.mark.parametrize('name,intensity', [('verhulst', 10.0), ('verhulst', 100.0), ('verhulst', 1000.0)])
def test_curvature_at_the_threshold_matches_on_both_sides(name, intensity):
    spec, pair, result = solved(name, intensity)
    vf = ValueFunction(spec, pair, result)
    expected = vf.expected_curvature()
    below = vf.second_derivative(result.y_star, side='below')
    above = vf.second_derivative(result.y_star, side='above')
    assert below == pytest.approx(expected, rel=1e-3, abs=5e-4)
    assert above == pytest.approx(expected, rel=1e-3, abs=5e-4)


def test_variational_inequalities_hold(instance, grid):
    spec, _, result, vf = instance
    points = away_from(grid(spec, n=40), result.y_star)
    points = np.append(points, result.y_star)
    report = variational_check(spec, vf, points)

    assert len(report) == len(points)
    assert report.passed, report.failures
    assert {row.region for row in report} == {'below', 'above', 'boundary'}
    assert report.tolerance == pytest.approx(1e-4 * max(1.0, abs(result.beta)))
    assert set(report.as_rows()[0]) == {'x', 'region', 'derivative_gap', 'sign_ok', 'residual', 'residual_ok'}


def test_a_shifted_threshold_fails_the_check(instance, grid, caplog):
    spec, pair, result, _ = instance
    shifted = result._replace(y_star=result.y_star + 0.05 * max(1.0, abs(result.y_star)))
    vf = ValueFunction(spec, pair, shifted)
    points = away_from(grid(spec, n=30), shifted.y_star)

    with caplog.at_level(logging.INFO, logger='ergodicimpulse'):
        report = variational_check(spec, vf, points)
    assert not report.passed
    assert report.failures
    assert 'Variational check fails' in caplog.text


def test_derivative_and_value_agree(instance):
    _, _, result, vf = instance
    y = result.y_star
    for x in (y - 0.2 * max(abs(y), 0.5), y + 0.3 * max(abs(y), 0.5)):
        h = 1e-4
        slope = (vf(x + h) - vf(x - h)) / (2 * h)
        assert slope == pytest.approx(vf.derivative(x), rel=1e-5, abs=1e-7)


def test_vectorized_evaluation(instance):
    _, _, result, vf = instance
    y = result.y_star
    x = np.array([y - 0.1, y, y + 0.1])
    values = vf(x)
    assert values.shape == (3,)
    assert values[1] == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(vf.derivative(x), [vf.derivative(v) for v in x])


def test_j_function_is_smallest_at_x_tilde():
    spec, pair, _ = solved('ou', 10.0)
    x_tilde = find_x_tilde(spec, pair)
    centre = j_function(spec, pair, x_tilde)
    assert centre < j_function(spec, pair, x_tilde - 0.05)
    assert centre < j_function(spec, pair, x_tilde + 0.05)


def test_growth_condition():
    spec, _, _ = solved('verhulst', 100.0)
    condition = growth_condition(spec, np.geomspace(0.1, 50.0, 30), exponent=2.0)
    assert condition.holds
    assert condition.constant >= 1.0
    assert condition.points > 0

    nothing = growth_condition(spec, np.linspace(0.1, 0.9, 5), exponent=2.0)
    assert not nothing.holds
    assert nothing.constant is None


@pytest.mark.parametrize('intensity', [1.0, 10.0, 100.0])
def test_mean_reverting_value_function_fits_smoothly_across_signal_rates(intensity):
    spec, pair, result = solved('ou', intensity)
    vf = ValueFunction(spec, pair, result)
    y = result.y_star
    assert vf.below_derivative(y) == pytest.approx(spec.gamma, abs=1e-9)
    assert vf.above_derivative(y) == pytest.approx(spec.gamma, abs=1e-9)
    expected = vf.expected_curvature()
    assert vf.second_derivative(y, side='below') == pytest.approx(expected, rel=1e-3, abs=5e-4)
    assert vf.second_derivative(y, side='above') == pytest.approx(expected, rel=1e-3, abs=5e-4)


def test_continuation_derivative_stays_bounded_far_below_the_threshold():
    spec, pair, result = solved('ou', 10.0)
    vf = ValueFunction(spec, pair, result)
    assert vf.k(result.y_star) == 0.0
    for x in (-4.0, -3.0, -2.0):
        slope = vf.below_derivative(x)
        # W' tends to -1 / b far below a cost |x|
        assert -1.0 < slope < spec.gamma
    report = variational_check(spec, vf, np.array([-4.0, -3.5, -2.0]))
    assert report.passed, report.failures


def test_resolvent_is_linear():
    spec, pair, _ = solved('ou', 10.0)
    f = lambda z: np.abs(z)  # noqa: E731
    g = lambda z: np.exp(-z * z)  # noqa: E731
    for x in (-0.8, 0.2, 1.5):
        combined = resolvent(spec, pair, lambda z: 2.0 * f(z) - 3.0 * g(z), x)
        separate = 2.0 * resolvent(spec, pair, f, x) - 3.0 * resolvent(spec, pair, g, x)
        assert combined == pytest.approx(separate, rel=1e-8, abs=1e-12)


def test_resolvent_inverts_lambda_minus_the_generator():
    spec, pair, _ = solved('ou', 10.0)
    g = lambda z: np.exp(-z * z)  # noqa: E731
    h = 1e-4
    for x in (-1.0, 0.0, 0.6):
        value = resolvent(spec, pair, g, x)
        first = resolvent_prime(spec, pair, g, x)
        second = (resolvent_prime(spec, pair, g, x + h) - resolvent_prime(spec, pair, g, x - h)) / (2 * h)
        sigma = float(spec.model.volatility(x))
        generator = 0.5 * sigma ** 2 * second + float(spec.model.drift(x)) * first
        assert spec.intensity * value - generator == pytest.approx(float(g(x)), rel=1e-5, abs=1e-7)


def test_resolvent_prime_matches_a_finite_difference():
    spec, pair, _ = solved('verhulst', 100.0)
    f = lambda z: z * z  # noqa: E731
    h = 1e-4
    for x in (0.2, 0.5, 1.1):
        slope = (resolvent(spec, pair, f, x + h) - resolvent(spec, pair, f, x - h)) / (2 * h)
        assert resolvent_prime(spec, pair, f, x) == pytest.approx(slope, rel=1e-5)
