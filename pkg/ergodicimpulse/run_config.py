"""
The run configuration: a strict typed tree read from JSON (or YAML) documents.

Examples::

    config = RunConfig()
    config.load('run.json')
    spec = config.problem_spec()
    sim = config.sim_config(seed=7)
"""
import logging

from .diffusions import ProblemSpec, Tolerances, absolute_cost, model_by_name, power_cost, table_cost
from .exceptions import InvalidValue, UnsupportedVersion
from .managers import Config
from .simulator import SimConfig


log = logging.getLogger(__name__)

SPEC_VERSION = 1

#: Result-file column names accepted in place of top-level keys.
KEY_ALIASES = {
    'lambda': 'intensity',
    'lambdas': 'intensities',
}


def _float(**attributes):
    attributes['@type'] = 'float'
    return attributes


def run_schema():
    defaults = Tolerances()
    return {
        'spec_version': {'@type': 'int', '@default': SPEC_VERSION},
        'model': {
            'name': {'@type': 'str', '@default': 'verhulst_pearl',
                     '@choices': ['verhulst_pearl', 'ornstein_uhlenbeck', 'brownian_motion']},
            'mu': _float(),
            'sigma': _float(**{'@positive': True}),
            'b': _float(),
            'drift': _float(),
            'volatility': _float(**{'@positive': True}),
            'scale_anchor': _float(**{'@positive': True}),
        },
        'cost': {
            'kind': {'@type': 'str', '@default': 'power', '@choices': ['power', 'absolute', 'table']},
            'exponent': _float(**{'@default': 2.0, '@positive': True}),
            'gamma': _float(**{'@default': 1.0}),
            'x_star': _float(),
            'table': {
                'x': {'@type': 'float_list'},
                'y': {'@type': 'float_list'},
            },
            'minimizer_bracket': {'@type': 'float_list'},
        },
        'intensity': _float(**{'@positive': True, '@envvar': 'ERGODICIMPULSE_INTENSITY'}),
        'intensities': {'@type': 'float_list', '@default': []},
        'tolerances': {
            name: _float(**{'@default': getattr(defaults, name), '@positive': True})
            for name in Tolerances._fields
        },
        'simulation': {
            'time_step': _float(**{'@default': 1e-3, '@positive': True}),
            'horizon': _float(**{'@default': 1e4, '@positive': True}),
            'burn_in': _float(**{'@non_negative': True}),
            'replicates': {'@type': 'int', '@default': 32, '@positive': True},
            'seed': {'@type': 'int', '@default': 0, '@non_negative': True},
            'initial_state': _float(),
            'thresholds': {'@type': 'float_list', '@default': []},
            'common_random_numbers': {'@type': 'bool', '@default': True},
        },
        'output': {
            'directory': {'@type': 'str', '@default': '.'},
            'format': {'@type': 'str', '@default': 'json', '@choices': ['json', 'csv', 'both']},
        },
    }


#: Model parameters each built-in model accepts.
MODEL_PARAMETERS = {
    'verhulst_pearl': ('mu', 'sigma', 'b', 'scale_anchor'),
    'ornstein_uhlenbeck': ('b',),
    'brownian_motion': ('drift', 'volatility'),
}


class RunConfig(Config):
    """
    Configuration of one command invocation. Unknown keys are rejected.
    """

    def __init__(self, **settings):
        super(RunConfig, self).__init__(run_schema(), **settings)
        self.hooks.not_found(self._resolve_alias)
        self.hooks.item_value_changed(self._log_change)

    def _resolve_alias(self, name=None, section=None, **kwargs):
        if section is self and name in KEY_ALIASES:
            return self._tree[KEY_ALIASES[name]]

    def _log_change(self, item=None, old_value=None, new_value=None, **kwargs):
        log.debug('%s changed from %r to %r', item.str_path, old_value, new_value)

    def validate(self):
        super(RunConfig, self).validate()
        version = self.spec_version.value
        if version != SPEC_VERSION:
            raise UnsupportedVersion(version, SPEC_VERSION)

    def _values(self, section):
        return {name: item.value for name, item in section.iter_items(key='str_path') if item.has_value}

    def build_model(self):
        values = self._values(self.get_section('model'))
        name = values.pop('name')
        allowed = MODEL_PARAMETERS[name]
        for key, value in values.items():
            if key not in allowed:
                raise InvalidValue('model.{}'.format(key), value, 'not a parameter of {}'.format(name))
        return model_by_name(name, **values)

    def build_cost(self):
        section = self.get_section('cost')
        kind = section.kind.value
        gamma = section.gamma.value
        x_star = section.x_star.value
        if kind == 'power':
            return power_cost(exponent=section.exponent.value, gamma=gamma, x_star=x_star)
        if kind == 'absolute':
            return absolute_cost(gamma=gamma, x_star=x_star)
        table = section.get_section('table')
        if table.x.value is None or table.y.value is None:
            raise InvalidValue('cost.table', None, 'a tabulated cost needs both x and y')
        return table_cost(table.x.value, table.y.value, gamma=gamma, x_star=x_star)

    def build_tolerances(self):
        return Tolerances(**self._values(self.get_section('tolerances')))

    def build_minimizer_bracket(self):
        bracket = self['cost.minimizer_bracket'].value
        if bracket is None:
            return None
        if len(bracket) != 2 or not bracket[0] < bracket[1]:
            raise InvalidValue('cost.minimizer_bracket', bracket, 'must be two increasing numbers')
        return tuple(bracket)

    def problem_spec(self, intensity=None):
        """
        Args:
            intensity: overrides the configured signal rate (used by sweeps).

        Raises:
            InvalidValue: no rate is configured or a field is inconsistent.
        """
        self.validate()
        if intensity is None:
            intensity = self.intensity.value
        if intensity is None:
            if self.intensities.value:
                intensity = self.intensities.value[0]
            else:
                raise InvalidValue('intensity', None, 'a signal rate is required')
        return ProblemSpec(
            self.build_model(), self.build_cost(), intensity,
            tolerances=self.build_tolerances(), minimizer_bracket=self.build_minimizer_bracket(),
        )

    def sim_config(self, seed=None, jobs=None):
        self.validate()
        values = self._values(self.get_section('simulation'))
        values.pop('thresholds', None)
        if seed is not None:
            values['seed'] = seed
        values['jobs'] = jobs
        return SimConfig(**values)
