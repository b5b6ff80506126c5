import numpy as np
import pytest

from ergodicimpulse.diffusions import ProblemSpec, absolute_cost, ornstein_uhlenbeck, power_cost, verhulst_pearl
from ergodicimpulse.fundamental import build_pair
from ergodicimpulse.presets import preset_config
from ergodicimpulse.solver import solve_threshold


_solved = {}


def solved(name, intensity):
    """
    ``(spec, pair, result)`` of a preset at one signal rate, computed once per test session.
    """
    key = (name, float(intensity))
    if key not in _solved:
        spec = preset_config(name, intensity=intensity).problem_spec()
        pair = build_pair(spec)
        _solved[key] = spec, pair, solve_threshold(spec, pair)
    return _solved[key]


@pytest.fixture
def verhulst_spec():
    return preset_config('verhulst', intensity=100).problem_spec()


@pytest.fixture
def ou_spec():
    return preset_config('ou', intensity=10).problem_spec()


@pytest.fixture
def solve_preset():
    return solved


def random_specs(n=5, seed=20261018):
    """
    Admissible specs drawn from a seeded generator: logistic models with harvesting
    revenue and mean-reverting models with a small unit cost.
    """
    rng = np.random.default_rng(seed)
    specs = []
    for i in range(n):
        if i % 2 == 0:
            model = verhulst_pearl(mu=rng.uniform(1.0, 2.0), sigma=1.0, b=rng.uniform(0.01, 0.1))
            cost = power_cost(exponent=2.0, gamma=-1.0)
            intensity = rng.uniform(5.0, 100.0)
        else:
            model = ornstein_uhlenbeck(b=rng.uniform(0.5, 2.0))
            cost = absolute_cost(gamma=rng.uniform(0.05, 0.3), x_star=0.0)
            intensity = rng.uniform(1.0, 50.0)
        specs.append(ProblemSpec(model, cost, intensity))
    return specs


@pytest.fixture
def grid():
    def make(spec, n=50):
        x_star = spec.x_star
        if spec.model.on_half_line:
            return np.geomspace(0.05 * max(x_star, 0.1), 20.0 * max(x_star, 0.1), n)
        return np.linspace(x_star - 4.0, x_star + 4.0, n)
    return make
