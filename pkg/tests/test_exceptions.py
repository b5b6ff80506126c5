import pytest

from ergodicimpulse.exceptions import (
    AssumptionViolation, BracketingError, ConfigError, DivergenceSuspected, ErgodicImpulseError, InvalidValue,
    ModelEvaluationError, NotFound, NumericalError, QuadratureError, RequiredValueMissing, SolverError,
    UnsupportedVersion,
)
from ergodicimpulse.managers import Config
from ergodicimpulse.run_config import RunConfig


def test_not_found_raised_for_unknown_items_and_sections_and_paths():
    config = RunConfig()

    with pytest.raises(NotFound):
        _ = config.market

    with pytest.raises(NotFound):
        _ = config.model.kappa

    with pytest.raises(NotFound):
        _ = config['simulation', 'steps']

    with pytest.raises(NotFound) as exc_info:
        _ = config['cost']['table']['z']
    assert exc_info.value.path == 'cost.table.z'
    assert str(exc_info.value) == "Unknown configuration key 'cost.table.z'"


def test_standard_exceptions_raised_for_unknown_attributes_of_item():
    config = RunConfig()

    with pytest.raises(AttributeError):
        _ = config.intensity.something

    with pytest.raises(TypeError):
        _ = config.intensity['something']


def test_required_value_missing_names_the_path():
    config = Config({'simulation': {'seed': {'@type': 'int', '@required': True}}})
    with pytest.raises(RequiredValueMissing) as exc_info:
        _ = config.simulation.seed.value
    assert str(exc_info.value) == "Required value 'simulation.seed' is missing"


def test_invalid_value():
    error = InvalidValue('simulation.horizon', -1.0, 'must be positive')
    assert error.path == 'simulation.horizon'
    assert error.value == -1.0
    assert str(error) == "Invalid value -1.0 for 'simulation.horizon': must be positive"


def test_hierarchy():
    for cls in (NotFound, RequiredValueMissing, InvalidValue, UnsupportedVersion):
        assert issubclass(cls, ConfigError)
    for cls in (ModelEvaluationError, QuadratureError, DivergenceSuspected, AssumptionViolation,
                BracketingError, SolverError):
        assert issubclass(cls, NumericalError)
    assert issubclass(ConfigError, ErgodicImpulseError)
    assert issubclass(NumericalError, ErgodicImpulseError)
    assert not issubclass(ConfigError, NumericalError)


def test_numerical_errors_carry_their_context():
    error = ModelEvaluationError(0.5, 'non-positive volatility')
    assert error.x == 0.5
    assert str(error) == 'non-positive volatility at x=0.5'

    error = QuadratureError((0.0, 1.0), 0.25, error=1e-3)
    assert error.interval == (0.0, 1.0)
    assert '[0.0, 1.0]' in str(error)

    error = BracketingError('H', [(0.1, 1.0), (0.2, 0.5)])
    assert str(error) == 'No sign change of H found; last samples 0.1: 1, 0.2: 0.5'

    error = SolverError('no root', {'bracket': (1, 2)})
    assert error.diagnostics == {'bracket': (1, 2)}
    assert str(error) == "no root {'bracket': (1, 2)}"

    assert str(UnsupportedVersion(2, 1)) == 'spec_version 2 is not supported (expected 1)'
