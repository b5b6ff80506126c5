import collections.abc

from .base import BaseItem, BaseSection


def parse_config_schema(schema, parent_section=None, root=None):
    """
    Turn a nested mapping into sections and items.

    A mapping whose keys all start with ``@`` declares a single item (``{'@type': 'float', '@default': 1.0}``);
    any other mapping declares a section. Plain values declare items with that default.
    """
    if root is not None:
        parent_section = root
        if not isinstance(schema, collections.abc.Mapping) or len(schema) == 0:
            raise ValueError('Config root schema has to be a non-empty mapping, got a {}'.format(type(schema)))

    if isinstance(schema, (BaseItem, BaseSection)):
        return schema

    if isinstance(schema, collections.abc.Mapping):
        meta = {}
        members = []
        for k, v in schema.items():
            if k.startswith('_'):
                continue
            elif k.startswith('@'):
                meta[k[1:]] = v
            else:
                members.append((k, v))

        if meta and members:
            raise ValueError('Schema mixes item attributes {} with members {}'.format(
                sorted(meta), [k for k, _ in members],
            ))

        if not members:
            return parent_section.create_item(**meta)

        section = root if root is not None else parent_section.create_section()
        for k, v in members:
            obj = parse_config_schema(v, parent_section=section)
            if obj.is_section:
                section.add_section(k, obj)
            else:
                section.add_item(k, obj)
        return section

    return parent_section.create_item(default=schema)
