"""Exception hierarchy shared by all memchan modules."""


class MemchanError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MemchanError, ValueError):
    pass


class DimensionMismatch(MemchanError, ValueError):
    pass


class IndexOutOfRange(MemchanError, IndexError):
    pass


class NotHermitian(MemchanError, ValueError):
    pass


class NoConvergence(MemchanError, ArithmeticError):
    pass


class NegativeSpectrum(MemchanError, ArithmeticError):
    pass


class ConfigError(MemchanError, ValueError):
    """Invalid run configuration. ``field`` names the offending option."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
