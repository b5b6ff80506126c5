import copy
import os

import six

from .base import BaseItem, ItemAttribute, not_set
from .exceptions import RequiredValueMissing, InvalidValue
from .item_types import Types


class Item(BaseItem):
    """
    A single typed setting of a run -- something that has a name, a type, a default value,
    a custom value and optional constraints.

    Attributes may be passed with or without the ``@`` prefix, which lets a schema
    dictionary declare them inline::

        >>> horizon = Item(**{'@type': 'float', '@default': 1e4, '@positive': True})
        >>> horizon.value
        10000.0
        >>> horizon.value = -1
        Traceback (most recent call last):
        ...
        InvalidValue: Invalid value -1 for 'horizon': must be positive
    """

    #: Name of the config item.
    name = ItemAttribute('name')

    #: Type of the config item's value, one of :class:`.Types`.
    type = ItemAttribute('type', default=Types.str)

    #: ``True`` if the item must have a value before the run starts.
    required = ItemAttribute('required', default=False)

    #: Name of an environment variable overriding the value.
    envvar = ItemAttribute('envvar', default=None)

    #: Numeric constraints; checked on every set.
    positive = ItemAttribute('positive', default=False)
    non_negative = ItemAttribute('non_negative', default=False)

    #: If set, the value must be one of these.
    choices = ItemAttribute('choices', default=None)

    #: One-line description shown by ``--help`` style listings.
    help = ItemAttribute('help', default=None)

    _known_attributes = ('name', 'type', 'default', 'value', 'required', 'envvar',
                         'positive', 'non_negative', 'choices', 'help')

    def _get_kwarg(self, name, kwargs):
        at_name = '@{}'.format(name)

        if name in kwargs:
            if at_name in kwargs:
                raise ValueError('Both {!r} and {!r} specified in kwargs'.format(name, at_name))
            return kwargs[name]

        if at_name in kwargs:
            return kwargs[at_name]

        return not_set

    def __init__(self, name=not_set, **kwargs):
        self._section = None

        if name is not not_set:
            if not isinstance(name, six.string_types):
                raise TypeError('Item name must be a string, got {!r}'.format(type(name)))
            self.name = name

        # Type must be known before default and value are deserialized.
        type_ = self._get_kwarg('type', kwargs)
        if type_ is not not_set:
            self.type = Types.translate(type_)
        else:
            value = self._get_kwarg('value', kwargs)
            default = self._get_kwarg('default', kwargs)
            if value is not not_set and value is not None:
                self.type = Types.guess(value)
            elif default is not not_set and default is not None:
                self.type = Types.guess(default)

        self._value = not_set
        self._default = not_set

        for k, v in kwargs.items():
            clean = k[1:] if k.startswith('@') else k
            if clean == 'type':
                continue
            if clean not in self._known_attributes:
                raise ValueError('Unknown item attribute {!r}'.format(k))
            setattr(self, clean, v)

    def __repr__(self):
        if self._value is not not_set:
            value = self._value
        else:
            value = self.default
        return '<{} {} {!r}>'.format(self.__class__.__name__, self.name, value)

    @property
    def value(self):
        """
        The property through which to read and set value of config item.
        """
        return self.get()

    @value.setter
    def value(self, value):
        self.set(value)

    @property
    def default(self):
        return self._default

    @default.setter
    def default(self, value):
        if value is not_set or value is None:
            self._default = value
            return
        self._default = self._clean(value)

    @property
    def str_path(self):
        if self.name is not_set:
            return '<unnamed>'
        return '.'.join(self.get_path())

    def _clean(self, raw_value):
        """
        Deserialize ``raw_value`` and apply the item's constraints.
        """
        try:
            value = self.type.deserialize(raw_value)
        except (TypeError, ValueError) as e:
            raise InvalidValue(self.str_path, raw_value, str(e) or 'cannot be read as {}'.format(self.type.aliases[0]))

        if value is None or value is not_set:
            return value

        if self.positive and not value > 0:
            raise InvalidValue(self.str_path, raw_value, 'must be positive')
        if self.non_negative and value < 0:
            raise InvalidValue(self.str_path, raw_value, 'must not be negative')
        if self.choices is not None and value not in self.choices:
            raise InvalidValue(self.str_path, raw_value, 'must be one of {}'.format(', '.join(map(str, self.choices))))
        return value

    def _get_envvar_value(self):
        if self.envvar and self.envvar in os.environ:
            return self._clean(os.environ[self.envvar])
        return not_set

    def get(self, fallback=not_set):
        """
        Returns config value.

        See Also:
            :meth:`.set` and :attr:`.value`
        """
        envvar_value = self._get_envvar_value()
        if envvar_value is not not_set:
            return envvar_value

        if self._value is not not_set:
            return self._value
        if self.default is not not_set:
            return copy.deepcopy(self.default)
        if fallback is not not_set:
            return fallback
        if self.required:
            raise RequiredValueMissing(name=self.name, item=self)
        return None

    def set(self, value):
        """
        Sets config value.

        Raises:
            InvalidValue: if the value cannot be deserialized or breaks a constraint.
        """
        old_value = self._value
        self._value = self._clean(value)

        if self.section:
            self.section.dispatch_event(
                self.section.hooks.item_value_changed,
                item=self,
                old_value=old_value,
                new_value=self._value,
            )

    def reset(self):
        """
        Resets the value of config item to its default value.
        """
        old_value = self._value
        self._value = not_set

        if old_value is not_set:
            return

        if self.section:
            self.section.dispatch_event(
                self.section.hooks.item_value_changed,
                item=self,
                old_value=old_value,
                new_value=not_set,
            )

    @property
    def is_default(self):
        """
        ``True`` if the item's value is its default value or if no value and no default value are set.
        """
        return self._value is not_set or self._value == self.default

    @property
    def has_value(self):
        """
        ``True`` if item has a default value or custom value set.
        """
        if self._get_envvar_value() is not not_set:
            return True
        return self.default not in (not_set, None) or self._value not in (not_set, None)

    @property
    def section(self):
        return self._section

    def get_path(self):
        if self.section:
            return self.section.get_path() + (self.name,)
        else:
            return self.name,

    def validate(self):
        if self.required and not self.has_value:
            raise RequiredValueMissing(name=self.name, item=self)
