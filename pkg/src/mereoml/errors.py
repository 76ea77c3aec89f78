"""Shared exception hierarchy.

Every error raised by this package derives from :class:`MereomlError`, so
callers (notably the CLI) can separate data problems from genuine bugs.
"""


class MereomlError(Exception):
    """Base class for all errors raised by mereoml."""


class CarrierMismatch(MereomlError):
    """Two entities from different carriers were combined."""


class ClassOfEmptyFamily(MereomlError):
    """The class operator was applied to an empty family."""


class DegreeUnderflow(MereomlError):
    """A composition bound was requested for a zero degree."""


class FoldError(MereomlError):
    """A cross-validation fold ended up with an empty training part."""


class NetworkError(MereomlError):
    """A fusion network violates the layer coordination rules."""
