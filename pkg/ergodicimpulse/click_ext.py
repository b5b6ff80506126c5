"""
An extension to the click framework to declare options that fall back to
(and write through to) items of a per-invocation configuration.

Each command invocation gets its own config instance, kept in ``ctx.obj``,
so repeated invocations in one process never share state.
"""


class ClickExtension(object):
    """
    Args:
        config_factory: zero-argument callable returning a fresh :class:`.Config`.

    Examples::

        run_options = ClickExtension(RunConfig)

        @click.command()
        @run_options.source_option('--config')
        @run_options.option('--seed', path='simulation.seed')
        def simulate(config, seed):
            ...

    ``config`` received by the command is the loaded config with all overrides applied.
    """

    def __init__(self, config_factory):
        try:
            import click
        except ImportError:
            raise RuntimeError('To use click extension, you should install click first')
        self._click = click
        self._factory = config_factory
        self._prototype = config_factory()

    def __getattr__(self, item):
        return getattr(self._click, item)

    def config_for(self, ctx):
        config_cls = type(self._prototype)
        if not isinstance(ctx.obj, config_cls):
            ctx.obj = self._factory()
        return ctx.obj

    def source_option(self, *args, **kwargs):
        """
        Registers an eager click.option naming a file to load into the invocation's config.
        The command receives the loaded config, not the path.
        """
        def callback(ctx, param, value):
            config = self.config_for(ctx)
            if value is not None:
                config.load(value)
            return config

        kwargs['callback'] = callback
        kwargs['is_eager'] = True
        kwargs.setdefault('default', None)
        kwargs.setdefault('type', self._click.Path(exists=True, dir_okay=False))
        return self._click.option(*args, **kwargs)

    def option(self, *args, **kwargs):
        """
        Registers a click.option which falls back to the config item at ``path``
        if user hasn't provided a value in the command line.
        A value given on the command line is set on the item, so it goes through the item's checks.
        """
        path = kwargs.pop('path')
        prototype_item = self._prototype[path]
        assert prototype_item.is_item

        original_callback = kwargs.pop('callback', None)

        def callback(ctx, param, value):
            item = self.config_for(ctx)[path]
            if value is None:
                value = item.value if item.has_value else None
            else:
                item.value = value
                value = item.value
            if original_callback:
                original_callback(ctx, param, value)
            return value

        kwargs['callback'] = callback
        kwargs.setdefault('default', None)

        if prototype_item.type.builtin_types and 'type' not in kwargs:
            kwargs['type'] = prototype_item.type.builtin_types[0]

        return self._click.option(*args, **kwargs)
