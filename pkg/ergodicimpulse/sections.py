import collections
import copy
import keyword

import six
from hookery import HookRegistry

from .base import BaseSection, is_config_item, is_config_section
from .exceptions import NotFound
from .meta import ConfigSettings
from .schema_parser import parse_config_schema


class _SectionHooks(HookRegistry):
    def __init__(self, section):
        super(_SectionHooks, self).__init__(section)
        self.not_found = self.register_event('not_found')
        self.item_value_changed = self.register_event('item_value_changed')


class Section(BaseSection):
    """
    Represents a section consisting of items (instances of :class:`.Item`) and other sections.
    """

    _default_settings = ConfigSettings(immutable=True)

    def __init__(self, schema=None, section=None):
        #: Actual contents of the section
        self._tree = collections.OrderedDict()

        #: Section to which this section belongs (if any at all)
        self._section = section

        #: Alias of this section with which it was added to its parent section
        self._section_alias = None

        self._hooks = _SectionHooks(self)

        if schema is not None:
            self.add_schema(schema)

    def __len__(self):
        return len(self._tree)

    def __bool__(self):
        return True

    def __iter__(self):
        for name in self._tree.keys():
            yield name

    def __repr__(self):
        return '<{cls} {alias} at {id}>'.format(cls=self.__class__.__name__, alias=self.alias, id=id(self))

    def __contains__(self, key):
        try:
            self._get_item_or_section(key, handle_not_found=False)
            return True
        except NotFound:
            return False

    def __getitem__(self, key):
        return self._get_item_or_section(key)

    def __getattr__(self, name):
        if not isinstance(name, six.string_types):
            raise TypeError('Expected a string, got a {!r}'.format(type(name)))
        if name.startswith('_'):
            raise AttributeError(name)
        return self._get_item_or_section(name)

    def __setattr__(self, name, value):
        if name.startswith('_'):
            return super(Section, self).__setattr__(name, value)
        if is_config_section(value):
            self.add_section(name, value)
        elif is_config_item(value):
            self.add_item(name, value)
        else:
            raise TypeError(
                'Section members can only be replaced with sections or items, '
                'got {type}. To set a value use ...{name}.value = <new_value>'.format(type=type(value), name=name)
            )

    def _get_item_or_section(self, key, handle_not_found=True):
        """
        Resolve a name, a dotted path, or a tuple path.

        If handle_not_found is ``False``, the ``not_found`` hook is not consulted.
        """
        if isinstance(key, six.string_types):
            if self.settings.str_path_separator in key:
                return self._get_item_or_section(tuple(key.split(self.settings.str_path_separator)),
                                                 handle_not_found=handle_not_found)

            if key.endswith('_') and keyword.iskeyword(key[:-1]):
                key = key[:-1]

            if key in self._tree:
                return self._tree[key]

            if handle_not_found:
                result = self.dispatch_event(self.hooks.not_found, name=key, section=self)
                if result is not None:
                    return result
            raise NotFound(key, section=self)

        if isinstance(key, (tuple, list)) and len(key) > 0:
            head = self._get_item_or_section(key[0], handle_not_found=handle_not_found)
            if len(key) == 1:
                return head
            if not head.is_section:
                raise NotFound(key[1], section=self)
            return head._get_item_or_section(tuple(key[1:]), handle_not_found=handle_not_found)

        raise TypeError('Expected either a string or a tuple as key, got {!r}'.format(key))

    def get_item(self, *key):
        item = self._get_item_or_section(key)
        if not item.is_item:
            raise RuntimeError('{} is a section, not an item'.format(key))
        return item

    def get_section(self, *key):
        section = self._get_item_or_section(key)
        if not section.is_section:
            raise RuntimeError('{} is an item, not a section'.format(key))
        return section

    @property
    def hooks(self):
        """
        Returns:
            _SectionHooks
        """
        return self._hooks

    @property
    def section(self):
        return self._section

    @property
    def alias(self):
        return self._section_alias

    def add_item(self, alias, item):
        if not isinstance(alias, six.string_types):
            raise TypeError('Item name must be a string, got a {!r}'.format(type(alias)))
        if self.settings.str_path_separator in alias:
            raise ValueError('Item name {!r} must not contain {!r}'.format(alias, self.settings.str_path_separator))

        item = copy.deepcopy(item)
        item.name = alias
        item._section = self
        self._tree[alias] = item

    def add_section(self, alias, section):
        if not isinstance(alias, six.string_types):
            raise TypeError('Section name must be a string, got a {!r}'.format(type(alias)))
        if self.settings.str_path_separator in alias:
            raise ValueError('Section alias {!r} must not contain {!r}'.format(alias, self.settings.str_path_separator))

        section._section = self
        section._section_alias = alias
        self._tree[alias] = section

    def iter_items(self, recursive=False, key='path'):
        """
        Returns:
            iterator: over ``(key, item)`` pairs of all items in this section (and sub-sections if
            ``recursive=True``). ``key`` is ``'path'`` (tuple), ``'str_path'`` or ``None`` for bare items.
        """
        for name, obj in self._tree.items():
            if obj.is_section:
                if recursive:
                    for sub_path, sub_item in obj.iter_items(recursive=True, key='path'):
                        yield self._emit((name,) + sub_path, sub_item, key)
            else:
                yield self._emit((name,), obj, key)

    def _emit(self, path, obj, key):
        if key == 'path':
            return path, obj
        if key == 'str_path':
            return self.settings.str_path_separator.join(path), obj
        if key is None:
            return obj
        raise ValueError('Invalid key {!r}'.format(key))

    def reset(self):
        for item in self.iter_items(recursive=True, key=None):
            item.reset()

    @property
    def is_default(self):
        return all(item.is_default for item in self.iter_items(recursive=True, key=None))

    def dump_values(self, with_defaults=True, dict_cls=dict):
        """
        Export values of all items contained in this section to a dictionary.

        Items with no values set (and no defaults set if ``with_defaults=True``) are excluded.
        """
        values = dict_cls()
        for name, obj in self._tree.items():
            if is_config_section(obj):
                section_values = obj.dump_values(with_defaults=with_defaults, dict_cls=dict_cls)
                if section_values:
                    values[name] = section_values
            elif obj.has_value and (with_defaults or not obj.is_default):
                values[name] = obj.type.serialize(obj.value)
        return values

    def load_values(self, dictionary, strict=None):
        """
        Import config values from a dictionary.

        Args:
            dictionary: nested mapping mirroring the section tree.
            strict: if ``True`` (the default taken from settings), names that neither exist nor are
                resolved by a ``not_found`` hook raise :class:`.NotFound`;
                otherwise they are skipped.
        """
        if strict is None:
            strict = self.settings.strict

        if not isinstance(dictionary, dict):
            raise TypeError('Expected a mapping for section {!r}, got {!r}'.format(self.alias, type(dictionary)))

        for name, value in dictionary.items():
            if name in self._tree:
                resolution = self._tree[name]
            else:
                resolution = self.dispatch_event(self.hooks.not_found, name=name, section=self)
                if resolution is None:
                    if strict:
                        raise NotFound(name, section=self)
                    continue

            if is_config_item(resolution):
                resolution.value = value
            else:
                resolution.load_values(value, strict=strict)

    def create_item(self, *args, **kwargs):
        return self.settings.item_factory(*args, **kwargs)

    def create_section(self, *args, **kwargs):
        kwargs.setdefault('section', self)
        return self.settings.section_factory(*args, **kwargs)

    @property
    def settings(self):
        """
        Settings of the configuration tree this section belongs to, or the immutable
        defaults for free-floating sections.
        """
        if self._section:
            return self._section.settings
        return self._default_settings

    def add_schema(self, schema):
        parse_config_schema(schema, root=self)

    def get_path(self):
        if not self.alias:
            return ()
        if self.section:
            return self.section.get_path() + (self.alias,)
        return self.alias,

    def dispatch_event(self, event_, **kwargs):
        """
        Dispatch section event, first in this section, then up the tree until a hook returns a result.
        """
        if self.settings.hooks_enabled:
            result = self.hooks.dispatch_event(event_, **kwargs)
            if result is not None:
                return result
        if self.section:
            return self.section.dispatch_event(event_, **kwargs)
