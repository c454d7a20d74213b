"""Shared exception types."""


class SurSmrError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(SurSmrError):
    """Domain data violates an invariant (bad ladder, ragged panel, ...)."""


class FormatError(SurSmrError):
    """A file does not match its declared schema."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f"{path}: "
        if line is not None:
            loc = f"{loc}line {line}: "
        super().__init__(f"{loc}{message}")
        self.path = path
        self.line = line


class CheckpointError(SurSmrError):
    """Checkpoint file is corrupt, incompatible, or mismatched."""


class TrainingDiverged(SurSmrError):
    """Training loss became non-finite."""
