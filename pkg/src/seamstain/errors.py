"""Exception types shared across the package.

Validation errors (bad arguments, bad geometry, malformed files) derive from
:class:`ValidationError`; failures that occur mid-run (worker crash, protocol
breakage, timeouts) derive from :class:`RuntimeFailure`.  The CLI maps the
former to exit code 2 and the latter to exit code 3.
"""


class SeamstainError(Exception):
    """Base class for all package errors."""


class ValidationError(SeamstainError):
    """Bad inputs detected before any work is done."""


class RuntimeFailure(SeamstainError):
    """Failure during processing of otherwise valid inputs."""


class ImageReadError(ValidationError):
    """Unreadable, truncated, or unsupported image file."""


class BoundsError(ValidationError):
    """Region or index falls outside an image or plan."""


class GeometryError(ValidationError):
    """Inconsistent tile geometry or slide too small for its context ring."""


class TileAssemblyError(ValidationError):
    """Missing, duplicate, or mis-sized tile handed to the stitcher."""


class HistogramError(ValidationError):
    """Histogram cannot be built or operands are incompatible."""


class ProtocolError(RuntimeFailure):
    """External translator violated the wire protocol."""


class TranslationTimeout(RuntimeFailure):
    """External translator did not answer within the deadline."""


class TranslatorExited(RuntimeFailure):
    """External translator process terminated unexpectedly."""
