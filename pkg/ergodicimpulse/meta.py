from .items import Item


class ConfigSettings(object):
    """
    Settings shared by all sections of one configuration tree.
    """

    def __init__(self, immutable=False, **settings):
        self._is_immutable = immutable
        self._settings = {
            'item_factory': Item,
            'section_factory': None,
            'hooks_enabled': True,
            'str_path_separator': '.',
            'strict': True,
        }
        for k, v in settings.items():
            if k not in self._settings:
                raise ValueError('Unknown setting {!r}'.format(k))
            self._settings[k] = v

    def __repr__(self):
        return '<{} {!r}>'.format(self.__class__.__name__, self._settings)

    def __getattr__(self, name):
        if name.startswith('_'):
            raise AttributeError(name)
        if name == 'section_factory' and self._settings['section_factory'] is None:
            from .sections import Section
            return Section
        if name in self._settings:
            return self._settings[name]
        raise AttributeError(name)

    def __setattr__(self, name, value):
        if name.startswith('_'):
            return super(ConfigSettings, self).__setattr__(name, value)
        if self._is_immutable:
            raise AttributeError('Default settings are immutable')
        self._settings[name] = value
