from .meta import ConfigSettings
from .persistence import ConfigPersistenceAdapter, JsonCodec, YamlCodec, format_for
from .schema_parser import parse_config_schema
from .sections import Section


class Config(Section):
    """
    Represents a configuration tree.

    Examples::

        config = Config({
            'model': {
                'name': 'ornstein_uhlenbeck',
                'b': {'@type': 'float', '@default': 0.1, '@positive': True},
            },
            'intensity': {'@type': 'float', '@positive': True},
        })

        >>> config.model.b.value
        0.1

        >>> config['model.name'].value
        'ornstein_uhlenbeck'

        >>> config.json.loads('{"intensity": 10}')
        >>> config.intensity.value
        10.0

    Unknown keys in loaded documents raise :class:`.NotFound` unless the config
    was created with ``strict=False``.
    """

    is_config = True

    def __init__(self, schema=None, **settings):
        self._settings = ConfigSettings(**settings)

        super(Config, self).__init__()

        self._json_adapter = None
        self._yaml_adapter = None

        if schema is not None:
            parse_config_schema(schema, root=self)

    @property
    def settings(self):
        return self._settings

    @property
    def json(self):
        """
        Adapter to dump/load JSON format strings and files.

        Returns:
            ConfigPersistenceAdapter
        """
        if self._json_adapter is None:
            self._json_adapter = ConfigPersistenceAdapter(config=self, codec=JsonCodec())
        return self._json_adapter

    @property
    def yaml(self):
        """
        Adapter to dump/load YAML format strings and files.

        Returns:
            ConfigPersistenceAdapter
        """
        if self._yaml_adapter is None:
            self._yaml_adapter = ConfigPersistenceAdapter(config=self, codec=YamlCodec())
        return self._yaml_adapter

    def load(self, source):
        """
        Load values from a file, picking the format by its extension.
        """
        adapter = getattr(self, format_for(source))
        adapter.load(source)

    def validate(self):
        for item in self.iter_items(recursive=True, key=None):
            item.validate()
