import numpy as np
import pytest

from ergodicimpulse.diffusions import (
    ProblemSpec, absolute_cost, brownian_motion, diffusion_model, ornstein_uhlenbeck, power_cost,
    scale_density, speed_density, verhulst_pearl,
)
from ergodicimpulse.fundamental import CLOSED_FORM, ODE_NUMERIC, build_pair
from ergodicimpulse.presets import preset_config
from ergodicimpulse.quadrature import integrate_upper_tail


def make_spec(model, intensity):
    cost = power_cost(gamma=-1.0) if model.on_half_line else absolute_cost(gamma=0.1, x_star=0.0)
    return ProblemSpec(model, cost, intensity)


cases = [
    (verhulst_pearl(mu=1.0, sigma=1.0, b=0.01), 10.0),
    (verhulst_pearl(mu=1.5, sigma=0.9, b=0.1), 3.0),
    (verhulst_pearl(mu=1.0, sigma=1.0, b=0.0), 5.0),
    (ornstein_uhlenbeck(b=1.0), 10.0),
    (ornstein_uhlenbeck(b=0.5), 1.0),
    (brownian_motion(drift=0.5, volatility=1.0), 2.0),
]


def points_for(model):
    if model.on_half_line:
        return np.array([0.1, 0.4, 1.0, 2.5, 6.0])
    return np.array([-2.0, -0.5, 0.0, 0.7, 2.0])


def riccati_residual(model, intensity, rate, x, h=1e-5):
    """``r' - 2 (lambda - mu r) / sigma^2 + r^2`` with a central difference for ``r'``."""
    r = rate(x)
    slope = (rate(x + h) - rate(x - h)) / (2 * h)
    return slope - 2.0 * (intensity - model.drift(x) * r) / model.volatility(x) ** 2 + r * r


@pytest.mark.parametrize('model,intensity', cases, ids=lambda v: repr(v))
def test_closed_form_pair_solves_the_equation(model, intensity):
    pair = build_pair(make_spec(model, intensity))
    assert pair.provenance == CLOSED_FORM
    x = points_for(model)

    for rate in (pair.dlog_phi, pair.dlog_psi):
        residual = riccati_residual(model, intensity, rate, x)
        assert np.allclose(residual, 0.0, atol=1e-4 * max(intensity, 1.0))

    assert np.all(pair.dlog_phi(x) < 0)
    assert np.all(pair.dlog_psi(x) > 0)
    assert pair.log_phi(pair.x_ref) == pytest.approx(0.0, abs=1e-14)
    assert pair.log_psi(pair.x_ref) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize('model,intensity', cases, ids=lambda v: repr(v))
def test_wronskian_is_constant(model, intensity):
    pair = build_pair(make_spec(model, intensity))
    x = points_for(model)
    assert pair.wronskian > 0
    assert np.allclose(pair.wronskian_at(x), pair.wronskian, rtol=1e-8)


@pytest.mark.parametrize('model,intensity', cases, ids=lambda v: repr(v))
def test_decreasing_solution_integrates_against_the_speed_measure(model, intensity):
    # int_x^inf phi(z) m'(z) dz = -phi'(x) / (lambda S'(x))
    pair = build_pair(make_spec(model, intensity))
    for x in points_for(model)[1:4]:
        integral = integrate_upper_tail(
            lambda z: pair.phi_ratio(z, x) * speed_density(model, z), x, decay_hint=abs(pair.dlog_phi(x)),
        )
        expected = -pair.dlog_phi(x) / (intensity * scale_density(model, x))
        assert integral == pytest.approx(expected, rel=1e-7)


@pytest.mark.parametrize('model,intensity', cases, ids=lambda v: repr(v))
def test_ode_route_agrees_with_closed_forms(model, intensity):
    spec = make_spec(model, intensity)
    closed = build_pair(spec)
    numeric = build_pair(spec, closed_form=False)
    assert numeric.provenance == ODE_NUMERIC

    x = points_for(model)
    assert np.allclose(numeric.dlog_phi(x), closed.dlog_phi(x), rtol=1e-6, atol=1e-8)
    assert np.allclose(numeric.dlog_psi(x), closed.dlog_psi(x), rtol=1e-6, atol=1e-8)
    assert np.allclose(numeric.log_phi(x), closed.log_phi(x), rtol=1e-6, atol=1e-6)
    assert np.allclose(numeric.log_psi(x), closed.log_psi(x), rtol=1e-6, atol=1e-6)


def test_generic_model_falls_back_to_the_ode_route():
    model = diffusion_model(lambda x: -x, lambda x: np.ones_like(x), lower=-np.inf)
    pair = build_pair(make_spec(model, 4.0))
    assert pair.provenance == ODE_NUMERIC

    reference = build_pair(make_spec(ornstein_uhlenbeck(b=1.0), 4.0))
    x = np.array([-1.0, 0.0, 1.5])
    assert np.allclose(pair.dlog_phi(x), reference.dlog_phi(x), rtol=1e-6)


def test_brownian_pair():
    pair = build_pair(make_spec(brownian_motion(), 2.0))
    assert pair.phi(1.0) == pytest.approx(np.exp(-2.0))
    assert pair.psi(1.0) == pytest.approx(np.exp(2.0))
    assert pair.wronskian == pytest.approx(4.0)
    assert pair.phi_ratio(3.0, 1.0) == pytest.approx(np.exp(-4.0))


def test_scalars_in_scalars_out():
    pair = build_pair(make_spec(ornstein_uhlenbeck(b=1.0), 10.0))
    assert isinstance(pair.phi(0.3), float)
    assert isinstance(pair.dlog_psi(0.3), float)
    assert pair.phi_prime(0.3) == pytest.approx(pair.phi(0.3) * pair.dlog_phi(0.3))
    assert pair.psi_prime(0.3) == pytest.approx(pair.psi(0.3) * pair.dlog_psi(0.3))


def test_mean_reverting_pair_is_symmetric():
    pair = build_pair(make_spec(ornstein_uhlenbeck(b=1.0), 10.0))
    x = np.array([0.2, 1.0, 3.0])
    assert np.allclose(pair.log_psi(x), pair.log_phi(-x))
    assert np.allclose(pair.dlog_psi(x), -pair.dlog_phi(-x))


def test_logarithms_stay_finite_where_values_underflow():
    pair = build_pair(make_spec(ornstein_uhlenbeck(b=1.0), 1000.0))
    assert pair.phi(40.0) == 0.0
    assert np.isfinite(pair.log_phi(40.0))
    assert pair.log_phi(40.0) < -1000
    assert 0 < pair.phi_ratio(40.0, 39.5) < 1


@pytest.mark.parametrize('name,x,z', [('verhulst', 0.3, 0.8), ('verhulst', 1.0, 4.0), ('ou', -1.0, 0.5), ('ou', 0.2, 1.5)])
def test_hitting_ratio_decreases_with_the_signal_rate(name, x, z):
    ratios = []
    for intensity in (0.5, 1.0, 5.0, 10.0, 50.0, 100.0, 1000.0):
        pair = build_pair(preset_config(name, intensity=intensity).problem_spec())
        ratios.append(float(pair.phi_ratio(z, x)))
    assert all(0 < r < 1 for r in ratios)
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < 1e-3
