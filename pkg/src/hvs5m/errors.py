"""Exception types shared across the engine.

Every error that crosses a module boundary is one of these, so the CLI can
map any failure to a single-line diagnostic and a nonzero exit code.
"""


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(EngineError, ValueError):
    """Array shapes are inconsistent with an operation's contract."""


class InputTooSmallError(EngineError, ValueError):
    """Spatial input is smaller than the operation's minimum extent."""


class ClipTooShortError(EngineError, ValueError):
    """Video clip has too few frames for motion extraction."""


class NumericError(EngineError, ArithmeticError):
    """A non-finite value appeared where the contract requires finiteness."""


class FormatError(EngineError, ValueError):
    """Base class for tensor-file format violations."""


class BadMagicError(FormatError):
    """File does not start with the expected magic bytes."""


class UnsupportedVersionError(FormatError):
    """File declares a format version this reader does not support."""


class TruncatedFileError(FormatError):
    """File ends before the declared payload is complete."""


class ManifestError(EngineError, ValueError):
    """Dataset manifest is syntactically or semantically invalid."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(EngineError, ValueError):
    """Configuration file or flag value is invalid."""


class CheckpointError(EngineError, ValueError):
    """Checkpoint is missing tensors or declares mismatched dimensions."""
