"""
Exceptions raised across pyva.

Every exception carries a short machine-readable ``code`` and the process
``exit_code`` the command line maps it to: validation problems exit with 1,
I/O and network problems with 2.
"""


class PyvaError(Exception):
    """Base class for all errors raised by pyva."""

    code = "error"
    exit_code = 1

    def one_line(self) -> str:
        message = " ".join(str(self).split())
        return f"pyva-error code={self.code} exit={self.exit_code}: {message}"


class ValidationError(PyvaError):
    """Input data or options are not acceptable."""

    code = "validation"


class FormatError(ValidationError, ValueError):
    """A file does not follow the expected layout (e.g. wrong column count)."""

    code = "format"


class SchemaError(ValidationError, ValueError):
    """A table does not match the schema it claims to follow."""

    code = "schema"


class TokenError(ValidationError, ValueError):
    """Cell values outside the declared label sets."""

    code = "token"

    def __init__(self, message, tokens=()):
        super().__init__(message)
        self.tokens = sorted(set(tokens))


class AlignmentError(ValidationError, ValueError):
    """Data and probability tables share no symptoms."""

    code = "alignment"


class ConfigurationError(ValidationError, ValueError):
    """Configuration (hierarchy, pipeline file, options) is inconsistent."""

    code = "config"


class TrainingError(ValidationError, ValueError):
    """Training data cannot produce a model."""

    code = "training"


class InconsistencyError(ValidationError):
    """Data leaves nothing to estimate, e.g. every cause is impossible."""

    code = "inconsistent"


class UnsupportedOperationError(ValidationError):
    """The requested summary does not exist for this kind of result."""

    code = "unsupported"


class ModelRequirementError(ValidationError):
    """A model was requested without the inputs it needs."""

    code = "model-requirement"


class PyvaIOError(PyvaError, OSError):
    """Reading, writing or downloading failed."""

    code = "io"
    exit_code = 2


class FetchError(PyvaIOError):
    """Downloading a remote table failed."""

    code = "fetch"

    def __init__(self, message, url=None):
        super().__init__(message)
        self.url = url


class MissingInputError(PyvaIOError, FileNotFoundError):
    """An input file named on the command line or in a pipeline is missing."""

    code = "missing-input"
