import numpy as np
import pytest

from ergodicimpulse.diffusions import (
    CostModel, ProblemSpec, Tolerances, absolute_cost, brownian_motion, diffusion_model, log_scale_density,
    model_by_name, ornstein_uhlenbeck, pi_gamma, pi_mu, power_cost, sample_grid, scale_density, speed_density,
    speed_measure, table_cost, verhulst_pearl,
)
from ergodicimpulse.exceptions import AssumptionViolation, InvalidValue, ModelEvaluationError


closed_form_models = [
    verhulst_pearl(mu=1.0, sigma=1.0, b=0.01),
    verhulst_pearl(mu=1.7, sigma=0.8, b=0.05, scale_anchor=2.0),
    ornstein_uhlenbeck(b=1.0),
    ornstein_uhlenbeck(b=0.1),
    brownian_motion(drift=0.5, volatility=1.2),
]


def points_for(model):
    if model.on_half_line:
        return np.array([0.05, 0.3, 1.0, 4.0, 20.0])
    return np.array([-3.0, -0.7, 0.0, 0.4, 2.5])


@pytest.mark.parametrize('model', closed_form_models, ids=repr)
def test_closed_form_scale_density_matches_quadrature(model):
    x = points_for(model)
    closed = log_scale_density(model, x)
    numeric = log_scale_density(model, x, closed_form=False)
    assert np.allclose(closed, numeric, rtol=1e-10, atol=1e-10)
    assert scale_density(model, model.scale_anchor) == pytest.approx(1.0)


@pytest.mark.parametrize('model', closed_form_models, ids=repr)
def test_closed_form_speed_density_matches_definition(model):
    x = points_for(model)
    assert np.allclose(speed_density(model, x), speed_density(model, x, closed_form=False), rtol=1e-10)


@pytest.mark.parametrize('model', closed_form_models, ids=repr)
def test_closed_form_speed_measure_matches_quadrature(model):
    x = points_for(model)[1:4]
    closed = speed_measure(model, x)
    numeric = speed_measure(model, x, closed_form=False)
    assert np.allclose(closed, numeric, rtol=1e-8)
    assert np.all(np.diff(closed) > 0)


def test_scalar_inputs_give_floats():
    model = ornstein_uhlenbeck(b=0.1)
    assert isinstance(scale_density(model, 2.0), float)
    assert scale_density(model, 2.0) == pytest.approx(np.exp(0.4))
    assert isinstance(speed_measure(model, 0.0), float)
    assert speed_measure(model, 0.0) == pytest.approx(np.sqrt(np.pi / 0.1))


def test_infinite_speed_measure_is_an_assumption_violation():
    with pytest.raises(AssumptionViolation) as exc_info:
        speed_measure(verhulst_pearl(mu=0.4, sigma=1.0, b=0.01), 1.0)
    assert exc_info.value.check == 'finite speed measure'

    with pytest.raises(AssumptionViolation):
        speed_measure(brownian_motion(drift=-0.5), 0.0)


def test_brownian_motion_rates_solve_the_characteristic_equation():
    model = brownian_motion(drift=0.3, volatility=0.7)
    for r in model.rates(2.0):
        assert 0.5 * 0.49 * r * r + 0.3 * r - 2.0 == pytest.approx(0.0, abs=1e-12)
    low, high = model.rates(2.0)
    assert low < 0 < high


def test_generic_model_uses_numeric_densities():
    model = diffusion_model(lambda x: -2.0 * x, lambda x: np.ones_like(x), lower=-np.inf)
    assert model.tag == 'none'
    assert log_scale_density(model, 1.5) == pytest.approx(2.0 * 1.5 ** 2, rel=1e-10)

    with pytest.raises(ValueError):
        diffusion_model(lambda x: x, lambda x: x, lower=1.0)


def test_model_evaluation_errors_name_the_point():
    model = diffusion_model(lambda x: np.log(x - 1.0), lambda x: np.ones_like(x))
    with np.errstate(invalid='ignore'):
        with pytest.raises(ModelEvaluationError) as exc_info:
            model.drift(np.array([2.0, 0.5]))
    assert exc_info.value.x == 0.5

    flat = diffusion_model(lambda x: x, lambda x: np.zeros_like(x))
    with pytest.raises(ModelEvaluationError) as exc_info:
        flat.volatility(0.3)
    assert 'volatility' in str(exc_info.value)


def test_model_by_name():
    model = model_by_name('verhulst_pearl', mu=2.0)
    assert model.mu == 2.0
    assert model.describe()['name'] == 'verhulst_pearl'
    with pytest.raises(InvalidValue):
        model_by_name('geometric')


def test_cost_helpers():
    spec = ProblemSpec(verhulst_pearl(), power_cost(gamma=-1.0), intensity=10)
    x = np.array([0.2, 0.5, 3.0])
    assert np.allclose(pi_mu(spec, x), x ** 2 - x * (1.0 - 0.01 * x))
    assert np.allclose(pi_gamma(spec, x), x ** 2 - 10.0 * x)
    assert isinstance(pi_mu(spec, 0.5), float)

    ou = ProblemSpec(ornstein_uhlenbeck(b=1.0), absolute_cost(gamma=0.1, x_star=0.0), intensity=1)
    assert pi_mu(ou, -2.0) == pytest.approx(2.0 + 0.2)
    assert ou.x_star == 0.0


def test_x_star_is_located_numerically():
    spec = ProblemSpec(verhulst_pearl(), power_cost(gamma=-1.0), intensity=10)
    assert spec.x_star == pytest.approx(1.0 / 2.02, abs=1e-7)

    ou = ProblemSpec(ornstein_uhlenbeck(b=2.0), power_cost(gamma=0.5), intensity=1)
    # pi_mu(x) = x^2 - x is smallest at 1/2
    assert ou.x_star == pytest.approx(0.5, abs=1e-7)
    assert ou.with_intensity(7).x_star == ou.x_star


def test_minimizer_at_the_edge_is_an_assumption_violation():
    spec = ProblemSpec(ornstein_uhlenbeck(b=1.0), CostModel(lambda x: np.exp(-x), gamma=0.0), intensity=1)
    with pytest.raises(AssumptionViolation):
        _ = spec.x_star


def test_problem_spec_validation():
    with pytest.raises(InvalidValue) as exc_info:
        ProblemSpec(ornstein_uhlenbeck(), absolute_cost(), intensity=0)
    assert exc_info.value.path == 'intensity'

    with pytest.raises(InvalidValue):
        ProblemSpec(ornstein_uhlenbeck(), absolute_cost(), intensity=float('inf'))

    with pytest.raises(InvalidValue) as exc_info:
        ProblemSpec(ornstein_uhlenbeck(), absolute_cost(), intensity=1, tolerances=Tolerances(root_tol=-1.0))
    assert exc_info.value.path == 'tolerances.root_tol'

    with pytest.raises(InvalidValue):
        absolute_cost(gamma=float('nan'))


def test_table_cost():
    cost = table_cost([0.0, 1.0, 2.0], [0.0, 1.0, 4.0], gamma=0.5, x_star=0.3)
    assert cost.running_cost(1.0) == pytest.approx(1.0)
    assert cost.running_cost(3.0) > 4.0
    assert cost.running_cost(2.0) == pytest.approx(4.0)

    with pytest.raises(InvalidValue) as exc_info:
        table_cost([0.0, 1.0], [0.0, 1.0])
    assert exc_info.value.path == 'cost.x_star'

    with pytest.raises(InvalidValue) as exc_info:
        table_cost([0.0, 0.0, 1.0], [0.0, 1.0, 2.0], x_star=0.5)
    assert exc_info.value.path == 'cost.table.x'


def test_sample_grid():
    half = sample_grid(verhulst_pearl(scale_anchor=2.0), n=5)
    assert half[0] == pytest.approx(2e-3)
    assert half[-1] == pytest.approx(2e2)

    line = sample_grid(ornstein_uhlenbeck(), n=5)
    assert line[2] == 0.0
    assert line[0] == pytest.approx(-line[-1])
