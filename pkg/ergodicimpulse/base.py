"""
Building blocks shared by items and sections of a run configuration.
"""


class _Unset(object):
    """
    Marks an item attribute or value that was never given. Falsy, and survives copies.
    """

    def __bool__(self):
        return False

    __nonzero__ = __bool__

    def __repr__(self):
        return '<not set>'

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __reduce__(self):
        return 'not_set'


not_set = _Unset()


class BaseItem(object):
    is_item = True
    is_section = False
    is_config = False


class BaseSection(object):
    is_item = False
    is_section = True
    is_config = False


def is_config_item(obj):
    return isinstance(obj, BaseItem)


def is_config_section(obj):
    return isinstance(obj, BaseSection)


class ItemAttribute(object):
    """
    Declares a per-item setting such as ``@default`` or ``@positive``; an item
    that was not given the setting reads ``default``.
    """

    def __init__(self, name, default=not_set):
        self.name = name
        self.default = default
        self._slot = '_' + name

    def __get__(self, instance, owner):
        if instance is None:
            return self
        return instance.__dict__.get(self._slot, self.default)

    def __set__(self, instance, value):
        instance.__dict__[self._slot] = value
