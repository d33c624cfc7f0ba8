"""Exception hierarchy shared by all modules."""


class RoughIdealError(Exception):
    """Base class for errors raised by this package."""


class ArgumentError(RoughIdealError, ValueError):
    """Raised when an argument is malformed (wrong shape, sign, order)."""


class WeightViolationError(ArgumentError):
    """Raised when a sampled weight breaks its declared lower bound.

    The offending (1-based) index is stored in ``index``.
    """

    def __init__(self, msg, index=None, value=None):
        super().__init__(msg)
        self.index = index
        self.value = value


class ConfigurationError(RoughIdealError):
    """Raised when parameters are individually valid but cannot work together
    (e.g. a horizon too short for the verdict window)."""


class PreconditionError(RoughIdealError):
    """Raised when a numerically validated hypothesis fails."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class InconclusiveError(RoughIdealError):
    """Raised when finite-horizon evidence cannot settle a question.

    ``scans`` carries whatever partial evidence was gathered.
    """

    def __init__(self, msg, scans=()):
        super().__init__(msg)
        self.scans = tuple(scans)


class UnknownNameError(RoughIdealError, KeyError):
    """Raised for lookups of unregistered names."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConfigError(RoughIdealError):
    """Raised by the experiment driver for invalid configuration documents.

    ``path`` is the dotted location of the offending field.
    """

    def __init__(self, msg, path=""):
        super().__init__(f"{path}: {msg}" if path else msg)
        self.path = path
