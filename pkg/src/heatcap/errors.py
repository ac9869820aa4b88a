"""Exception hierarchy shared across the pipeline.

Every error carries a ``stage`` tag naming the pipeline stage it belongs to,
so the CLI can map errors to exit codes and the HTTP service can report the
failing stage in structured bodies.
"""


class EngineError(Exception):
    """Base class for all pipeline errors."""

    stage = "pipeline"


class UnsupportedFormatError(EngineError):
    """Input file is readable but not one of the accepted formats."""

    stage = "raster"


class CorruptDataError(EngineError):
    """Input file is recognized but its contents cannot be decoded."""

    stage = "raster"


class NonRectangularCsvError(CorruptDataError):
    """CSV heatmap rows have differing lengths."""

    stage = "raster"


class InvalidDataError(EngineError):
    """Raster values violate numeric preconditions (NaN/Inf)."""

    stage = "raster"


class ColorTableError(EngineError):
    """Color-table data file failed validation."""

    stage = "colornames"


class ConfigError(EngineError):
    """Pipeline configuration file or overrides are invalid."""

    stage = "config"


class ClassifierError(EngineError):
    stage = "classify"


class ClassifierUnavailableError(ClassifierError):
    """Remote classifier endpoint unreachable or timed out."""


class ProtocolViolationError(ClassifierError):
    """Remote classifier returned a malformed or out-of-label-set answer."""


class StubMissError(ClassifierError):
    """Stub sidecar has no entry for the requested object."""


class LlmError(EngineError):
    stage = "llm"


class LlmTimeoutError(LlmError):
    """Chat endpoint did not answer within the configured timeout."""


class LlmHttpError(LlmError):
    """Chat endpoint answered with a non-success HTTP status."""

    def __init__(self, status: int, message: str = ""):
        super().__init__(message or f"chat endpoint returned HTTP {status}")
        self.status = status


class LlmAuthMissingError(LlmError):
    """Chat endpoint rejected the request with 401."""


class MalformedResponseError(LlmError):
    """Chat endpoint reply is missing the assistant message content."""
