"""Exception hierarchy."""


class PreservabilityError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PreservabilityError, ValueError):
    """Input shape, range or tolerance violation."""


class ChannelError(ValidationError):
    """A channel fails a physical requirement (CPTP, unital, covariance)."""


class NonUnitalError(ChannelError):
    pass


class UnsupportedChannelError(ChannelError):
    """Channel is valid but outside the family an operation is defined on."""


class DegenerateFacetError(PreservabilityError):
    """The vertex set is rank deficient; use the LP oracle instead."""


class DocumentError(ValidationError):
    """Malformed channel document (JSON syntax or schema)."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column
