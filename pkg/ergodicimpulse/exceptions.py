class ErgodicImpulseError(Exception):
    """
    Base class for all exceptions raised by *ergodicimpulse* that the caller may be able to recover from.
    """
    pass


class ConfigError(ErgodicImpulseError):
    """
    Base class for problems with a run configuration.
    """
    pass


class NotFound(ConfigError):
    """
    Section or item with the requested name or path is not found
    in the section it is being requested from.

    .. attribute:: name

        Name of the section or item which was not found

    .. attribute:: section

        :class:`.Section` instance which does not contain the sought name
    """

    def __init__(self, name, section=None):
        super(NotFound, self).__init__(name)
        self.name = name
        self.section = section

    @property
    def path(self):
        prefix = self.section.get_path() if self.section is not None else ()
        return '.'.join(prefix + (self.name,))

    def __str__(self):
        return 'Unknown configuration key {!r}'.format(self.path)

    def __repr__(self):
        return '<{} {!r}>'.format(self.__class__.__name__, self.path)


class RequiredValueMissing(ConfigError):
    """
    Value was requested from an item which requires a value, but had no
    default or custom value set.

    .. attribute:: name

        Name of the item

    .. attribute:: item

        :class:`.Item` instance
    """
    def __init__(self, name, item=None):
        super(RequiredValueMissing, self).__init__(name)
        self.name = name
        self.item = item

    def __str__(self):
        path = '.'.join(self.item.get_path()) if self.item is not None else self.name
        return 'Required value {!r} is missing'.format(path)

    def __repr__(self):
        return '<{} {!r} in {}>'.format(self.__class__.__name__, self.name, self.item)


class InvalidValue(ConfigError):
    """
    A configuration value was rejected by its item type or constraints.

    .. attribute:: path

        Dotted path of the offending item

    .. attribute:: value

        The rejected raw value
    """
    def __init__(self, path, value, reason):
        super(InvalidValue, self).__init__(path, value, reason)
        self.path = path
        self.value = value
        self.reason = reason

    def __str__(self):
        return 'Invalid value {!r} for {!r}: {}'.format(self.value, self.path, self.reason)

    def __repr__(self):
        return '<{} {!r} {!r}>'.format(self.__class__.__name__, self.path, self.value)


class UnsupportedVersion(ConfigError):
    def __init__(self, version, supported):
        super(UnsupportedVersion, self).__init__(version)
        self.version = version
        self.supported = supported

    def __str__(self):
        return 'spec_version {!r} is not supported (expected {!r})'.format(self.version, self.supported)


class NumericalError(ErgodicImpulseError):
    """
    Base class for failures of the numerical pipeline.
    """
    pass


class ModelEvaluationError(NumericalError):
    """
    A model function (drift, volatility, cost or a density) returned a non-finite
    or otherwise inadmissible value.

    .. attribute:: x

        The state at which evaluation failed
    """
    def __init__(self, x, message='non-finite model evaluation'):
        super(ModelEvaluationError, self).__init__(x, message)
        self.x = x
        self.message = message

    def __str__(self):
        return '{} at x={!r}'.format(self.message, self.x)


class QuadratureError(NumericalError):
    """
    Adaptive integration did not reach the requested tolerance.

    .. attribute:: interval

        ``(a, b)`` of the panel that failed to converge

    .. attribute:: estimate

        Last estimate of the integral
    """
    def __init__(self, interval, estimate, error=None):
        super(QuadratureError, self).__init__(interval, estimate)
        self.interval = interval
        self.estimate = estimate
        self.error = error

    def __str__(self):
        return 'Quadrature did not converge on [{!r}, {!r}], last estimate {!r} (error {!r})'.format(
            self.interval[0], self.interval[1], self.estimate, self.error,
        )


class DivergenceSuspected(NumericalError):
    """
    Progressive truncation of an improper integral detected no decay.
    """
    def __init__(self, start, accumulated, contribution):
        super(DivergenceSuspected, self).__init__(start, accumulated, contribution)
        self.start = start
        self.accumulated = accumulated
        self.contribution = contribution

    def __str__(self):
        return 'No decay detected for the tail integral from {!r} (accumulated {!r}, last panel {!r})'.format(
            self.start, self.accumulated, self.contribution,
        )


class AssumptionViolation(NumericalError):
    """
    A standing assumption on the model (e.g. finite speed measure at the lower boundary) fails.
    """
    def __init__(self, check, detail=None):
        super(AssumptionViolation, self).__init__(check, detail)
        self.check = check
        self.detail = detail

    def __str__(self):
        return '{}: {}'.format(self.check, self.detail)


class SpecialFunctionError(NumericalError):
    def __init__(self, function, parameters, message='evaluation failed'):
        super(SpecialFunctionError, self).__init__(function, parameters, message)
        self.function = function
        self.parameters = parameters
        self.message = message

    def __str__(self):
        return '{}{!r}: {}'.format(self.function, tuple(self.parameters), self.message)


class FundamentalSolutionError(NumericalError):
    pass


class BracketingError(NumericalError):
    """
    No sign change was found while expanding a bracket.

    .. attribute:: samples

        List of ``(x, value)`` pairs sampled during expansion
    """
    def __init__(self, function, samples):
        super(BracketingError, self).__init__(function, samples)
        self.function = function
        self.samples = samples

    def __str__(self):
        shown = ', '.join('{}: {:.3g}'.format(x, v) for x, v in self.samples[-6:])
        return 'No sign change of {} found; last samples {}'.format(self.function, shown)


class SolverError(NumericalError):
    """
    The threshold equation could not be solved.

    .. attribute:: diagnostics

        Dictionary with the bracket and the residual values at its ends
    """
    def __init__(self, message, diagnostics=None):
        super(SolverError, self).__init__(message)
        self.message = message
        self.diagnostics = diagnostics or {}

    def __str__(self):
        return '{} {!r}'.format(self.message, self.diagnostics)
