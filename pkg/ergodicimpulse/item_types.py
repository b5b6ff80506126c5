import math
import numbers

import six

from .base import not_set


class _ItemType(object):
    aliases = ()
    builtin_types = ()

    def serialize(self, instance, **kwargs):
        return instance

    def deserialize(self, payload, **kwargs):
        if payload is None or payload is not_set:
            return payload
        if self.builtin_types:
            return self.builtin_types[0](payload)
        else:
            return payload

    def includes(self, obj):
        """
        Returns:
            ``True`` if ``obj`` belongs to this type.
        """
        if self.builtin_types:
            return isinstance(obj, self.builtin_types)

    def accepts(self, obj):
        """
        Returns:
            ``True`` if ``obj`` can potentially be deserialized to an instance that belongs to this type.
        """
        return self.includes(obj)

    def __repr__(self):
        return '<{} {}>'.format(self.__class__.__name__, self.aliases)

    def __eq__(self, other):
        return isinstance(other, self.__class__)

    def __hash__(self):
        return hash(self.__class__)


class _NotSetType(_ItemType):
    def includes(self, obj):
        return obj is None or obj is not_set


class _StrType(_ItemType):
    aliases = ('str', 'string')
    builtin_types = str,

    def includes(self, obj):
        return isinstance(obj, six.string_types)

    def deserialize(self, payload, **kwargs):
        if payload is None or payload is not_set:
            return payload
        if not isinstance(payload, six.string_types):
            raise ValueError('expected a string')
        return payload


class _IntType(_ItemType):
    aliases = ('int', 'integer')
    builtin_types = int,

    def includes(self, obj):
        return isinstance(obj, six.integer_types) and not isinstance(obj, bool)

    def accepts(self, obj):
        return self.includes(obj) or isinstance(obj, six.string_types)

    def deserialize(self, payload, **kwargs):
        if payload is None or payload is not_set:
            return payload
        if isinstance(payload, bool):
            raise ValueError('expected an integer, got a boolean')
        if isinstance(payload, float):
            if not payload.is_integer():
                raise ValueError('expected an integer')
            return int(payload)
        return int(payload)


class _BoolType(_ItemType):
    aliases = ('bool', 'boolean')
    builtin_types = bool,

    truthy_values = ('yes', 'true', 'y', 't', 'on', '1')
    falsey_values = ('no', 'false', 'n', 'f', 'off', '0')

    def accepts(self, obj):
        if isinstance(obj, bool):
            return True
        if isinstance(obj, six.string_types):
            return obj.lower() in self.truthy_values + self.falsey_values
        return False

    def deserialize(self, payload, **kwargs):
        if payload is None or payload is not_set:
            return payload
        if isinstance(payload, bool):
            return payload
        if isinstance(payload, six.string_types):
            lowered = payload.lower()
            if lowered in self.truthy_values:
                return True
            if lowered in self.falsey_values:
                return False
        raise ValueError('expected a boolean')


def _finite_float(payload):
    if isinstance(payload, bool):
        raise ValueError('expected a number, got a boolean')
    if isinstance(payload, six.string_types):
        payload = payload.strip()
    value = float(payload)
    if not math.isfinite(value):
        raise ValueError('expected a finite number')
    return value


class _FloatType(_ItemType):
    """
    Real numbers. NaN and infinities are rejected: every numeric field of a run is finite.
    """
    aliases = ('float', 'double')
    builtin_types = float,

    def includes(self, obj):
        return isinstance(obj, float)

    def accepts(self, obj):
        return isinstance(obj, numbers.Real) and not isinstance(obj, bool)

    def deserialize(self, payload, **kwargs):
        if payload is None or payload is not_set:
            return payload
        return _finite_float(payload)


class _FloatListType(_ItemType):
    aliases = ('float_list', 'floats')
    builtin_types = list, tuple

    def includes(self, obj):
        return isinstance(obj, (list, tuple)) and all(isinstance(v, float) for v in obj)

    def deserialize(self, payload, **kwargs):
        if payload is None or payload is not_set:
            return payload
        if isinstance(payload, six.string_types):
            payload = [p for p in payload.split(',') if p.strip()]
        if not isinstance(payload, (list, tuple)):
            raise ValueError('expected a list of numbers')
        return [_finite_float(v) for v in payload]

    def serialize(self, instance, **kwargs):
        return list(instance)


class _Types(object):
    not_set = _NotSetType()
    str = _StrType()
    int = _IntType()
    bool = _BoolType()
    float = _FloatType()
    float_list = _FloatListType()

    all_types = (
        not_set,
        str,
        int,
        bool,
        float,
        float_list,
    )

    def __init__(self):
        self._includes_order = [
            self.not_set,
            self.bool,
            self.int,
            self.float,
            self.float_list,
            self.str,
        ]

    def guess(self, obj):
        for t in self._includes_order:
            if t.includes(obj):
                return t
        raise ValueError(obj)

    def translate(self, type_):
        """
        Given a built-in, an otherwise known type, or a name of known type, return its corresponding wrapper type::

            >>> Types.translate(float)
            <_FloatType ('float', 'double')>

            >>> Types.translate('float_list')
            <_FloatListType ('float_list', 'floats')>

        """
        if isinstance(type_, six.string_types):
            for t in self.all_types:
                if type_ in t.aliases:
                    return t
            raise ValueError('Failed to recognise type by name {!r}'.format(type_))

        if isinstance(type_, _ItemType):
            return type_

        for t in self.all_types:
            if type_ in t.builtin_types:
                return t

        raise ValueError('Failed to recognise type {!r}'.format(type_))


Types = _Types()
