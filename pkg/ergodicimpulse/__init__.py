__version__ = '0.1.0'

from .diffusions import (
    ProblemSpec, Tolerances, CostModel, DiffusionModel,
    verhulst_pearl, ornstein_uhlenbeck, brownian_motion, diffusion_model, model_by_name,
    power_cost, absolute_cost, table_cost,
)
from .exceptions import ErgodicImpulseError, ConfigError, NumericalError
from .assumptions import validate_assumptions
from .fundamental import build_pair
from .solver import solve_threshold, lambda_sweep, policy_cost
from .value_function import build_value_function, variational_check
from .simulator import PolicySpec, SimConfig, simulate_policy, estimate_beta, compare_policies
from .run_config import RunConfig
from .presets import preset_config


__all__ = [
    'ProblemSpec',
    'Tolerances',
    'CostModel',
    'DiffusionModel',
    'verhulst_pearl',
    'ornstein_uhlenbeck',
    'brownian_motion',
    'diffusion_model',
    'model_by_name',
    'power_cost',
    'absolute_cost',
    'table_cost',
    'ErgodicImpulseError',
    'ConfigError',
    'NumericalError',
    'validate_assumptions',
    'build_pair',
    'solve_threshold',
    'lambda_sweep',
    'policy_cost',
    'build_value_function',
    'variational_check',
    'PolicySpec',
    'SimConfig',
    'simulate_policy',
    'estimate_beta',
    'compare_policies',
    'RunConfig',
    'preset_config',
]
