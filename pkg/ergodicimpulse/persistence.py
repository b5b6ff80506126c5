"""
Reading and writing run configurations as JSON or YAML documents.
"""
import collections
import io
import json
import os.path

import six

from .exceptions import ConfigError


#: Document format for each recognised file extension.
FORMATS_BY_EXTENSION = {
    '.json': 'json',
    '.yaml': 'yaml',
    '.yml': 'yaml',
}


def format_for(path):
    """
    Raises:
        ConfigError: the extension of ``path`` is not a recognised format.
    """
    extension = os.path.splitext(path)[1].lower()
    try:
        return FORMATS_BY_EXTENSION[extension]
    except KeyError:
        raise ConfigError('Unrecognised config file extension for file {!r}'.format(path))


class JsonCodec(object):
    dict_cls = collections.OrderedDict

    def encode(self, values):
        return json.dumps(values, ensure_ascii=False, indent=2)

    def decode(self, text):
        try:
            return json.loads(text, object_pairs_hook=collections.OrderedDict)
        except ValueError as e:
            raise ConfigError('Malformed JSON configuration: {}'.format(e))


class YamlCodec(object):
    # safe_dump cannot represent OrderedDict
    dict_cls = dict

    def __init__(self):
        try:
            import yaml
        except ImportError:
            raise RuntimeError('To use YAML, please install PyYAML first')
        self.yaml = yaml

    def encode(self, values):
        return self.yaml.safe_dump(values, indent=2, default_flow_style=False, sort_keys=False)

    def decode(self, text):
        try:
            return self.yaml.safe_load(text) or {}
        except self.yaml.YAMLError as e:
            raise ConfigError('Malformed YAML configuration: {}'.format(e))


class ConfigPersistenceAdapter(object):
    """
    Binds a codec to a config so that ``config.json.load(path)`` and friends work.
    Loading goes through :meth:`.Section.load_values`, so unknown keys and invalid
    values are rejected as usual.
    """

    def __init__(self, config, codec):
        self._config = config
        self._codec = codec

    def load(self, source):
        """
        Load configuration values from a file path or an open file object.
        """
        if isinstance(source, six.string_types):
            with io.open(os.path.expanduser(source), encoding='utf-8') as f:
                self.loads(f.read())
        else:
            self.loads(source.read())

    def loads(self, text):
        self._config.load_values(self._codec.decode(text))

    def dumps(self, with_defaults=False):
        values = self._config.dump_values(with_defaults=with_defaults, dict_cls=self._codec.dict_cls)
        return self._codec.encode(values)

    def dump(self, destination, with_defaults=False):
        text = self.dumps(with_defaults=with_defaults)
        if isinstance(destination, six.string_types):
            with io.open(destination, 'w', encoding='utf-8') as f:
                f.write(text)
        else:
            destination.write(text)
