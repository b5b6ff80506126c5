import logging

import numpy as np
import pytest

from ergodicimpulse.assumptions import ValidationReport, validate_assumptions
from ergodicimpulse.diffusions import CostModel, ProblemSpec, brownian_motion, ornstein_uhlenbeck, power_cost, verhulst_pearl


check_names = [
    'finite_speed_measure',
    'integrable_pi_mu_near_lower',
    'scale_density_unbounded_at_lower',
    'unimodal_pi_mu',
    'non_negative_running_cost',
]


@pytest.mark.parametrize('fixture_name', ['verhulst_spec', 'ou_spec'])
def test_presets_pass_every_check(request, fixture_name):
    spec = request.getfixturevalue(fixture_name)
    report = validate_assumptions(spec)
    assert [c.name for c in report] == check_names
    assert report.passed, report.failures
    assert all(c.heuristic for c in report)


def test_infinite_speed_measure_fails_without_raising():
    spec = ProblemSpec(verhulst_pearl(mu=0.4, sigma=1.0, b=0.01), power_cost(gamma=-1.0), intensity=10)
    report = validate_assumptions(spec)
    assert not report.passed
    assert not report['finite_speed_measure'].passed
    assert 'diverges' in report['finite_speed_measure'].detail


def test_brownian_motion_with_negative_drift_fails():
    spec = ProblemSpec(brownian_motion(drift=-1.0), power_cost(gamma=0.1), intensity=1)
    report = validate_assumptions(spec)
    assert not report['finite_speed_measure'].passed


def test_negative_running_cost_fails(caplog):
    cost = CostModel(lambda x: x ** 2 - 1.0, gamma=0.1, x_star=0.05)
    spec = ProblemSpec(ornstein_uhlenbeck(b=1.0), cost, intensity=1)
    with caplog.at_level(logging.INFO, logger='ergodicimpulse'):
        report = validate_assumptions(spec)
    assert not report['non_negative_running_cost'].passed
    assert report['unimodal_pi_mu'].passed
    assert 'non_negative_running_cost' in caplog.text


def test_non_unimodal_pi_mu_fails():
    cost = CostModel(lambda x: np.abs(np.abs(x) - 1.0), gamma=0.0, x_star=1.0)
    spec = ProblemSpec(ornstein_uhlenbeck(b=1.0), cost, intensity=1)
    report = validate_assumptions(spec)
    assert not report['unimodal_pi_mu'].passed
    assert 'below x*' in report['unimodal_pi_mu'].detail


def test_report_rows():
    report = ValidationReport()
    report.add('a', True, 'fine')
    report.add('b', False, 'broken', heuristic=False)
    assert not report.passed
    assert [c.name for c in report.failures] == ['b']
    assert report.as_rows()[1] == {'check': 'b', 'status': 'fail', 'heuristic': False, 'detail': 'broken'}
    assert len(report) == 2
    with pytest.raises(KeyError):
        _ = report['c']
