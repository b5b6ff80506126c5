"""
The two worked configurations and their published reference thresholds.

``verhulst``: logistic growth with ``mu = sigma = 1``, ``b = 0.01``, running cost
``x^2`` and ``gamma = -1`` (a unit revenue per harvested unit), so that
``pi_mu(x) = x^2 - x (1 - 0.01 x)``.

``ou``: mean reversion ``dX = -X dt + dW`` with running cost ``|x|`` and
``gamma = 0.1``, so that ``pi_mu(x) = |x| - 0.1 x``.
"""
import collections

from .exceptions import InvalidValue
from .run_config import RunConfig


Preset = collections.namedtuple('Preset', 'name values published singular')


PRESETS = collections.OrderedDict([
    ('verhulst', Preset(
        name='verhulst',
        values={
            'model': {'name': 'verhulst_pearl', 'mu': 1.0, 'sigma': 1.0, 'b': 0.01},
            'cost': {'kind': 'power', 'exponent': 2.0, 'gamma': -1.0},
            'intensities': [5.0, 10.0, 50.0, 100.0, 1000.0],
        },
        published=collections.OrderedDict([
            (5.0, 0.317), (10.0, 0.496), (50.0, 0.656), (100.0, 0.684), (1000.0, 0.726),
        ]),
        singular=0.743,
    )),
    ('ou', Preset(
        name='ou',
        values={
            'model': {'name': 'ornstein_uhlenbeck', 'b': 1.0},
            'cost': {'kind': 'absolute', 'gamma': 0.1, 'x_star': 0.0},
            'intensities': [1.0, 5.0, 10.0, 100.0, 300.0],
        },
        published=collections.OrderedDict([
            (1.0, 0.182), (5.0, 0.301), (10.0, 0.353), (100.0, 0.469), (300.0, 0.496),
        ]),
        singular=0.535,
    )),
])


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise InvalidValue('preset', name, 'expected one of {}'.format(', '.join(PRESETS)))


def preset_config(name, intensity=None):
    """
    A fresh :class:`.RunConfig` holding the preset ``name``.

    Examples::

        >>> preset_config('ou', intensity=10).problem_spec().intensity
        10.0
    """
    preset = get_preset(name)
    config = RunConfig()
    config.load_values(preset.values)
    if intensity is not None:
        config.intensity.value = intensity
    return config
