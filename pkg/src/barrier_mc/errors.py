class BarrierMCError(Exception):
    """Base class for all errors raised by barrier_mc."""


class DomainError(BarrierMCError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(BarrierMCError):
    """A model or experiment is configured inconsistently."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
