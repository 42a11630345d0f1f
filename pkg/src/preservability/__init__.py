"""Convertibility of unital and Weyl-covariant channels under noisy super-channels."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ChannelError,
    DegenerateFacetError,
    DocumentError,
    NonUnitalError,
    PreservabilityError,
    UnsupportedChannelError,
    ValidationError,
)
