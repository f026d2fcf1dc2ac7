"""Exception types shared across the package."""


class QwlearnError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(QwlearnError, ValueError):
    """A parameter is out of range or non-finite."""


class InvalidGridError(InvalidParameterError):
    """A sweep grid is empty or inconsistent."""


class ShapeError(QwlearnError, ValueError):
    """Array shapes do not match the operation's contract."""


class OutOfBoundsError(QwlearnError):
    """A shift would move amplitude off the allocated lattice.

    Raised when the walk state was under-allocated for the requested
    number of steps.
    """


class InsufficientDataError(QwlearnError, ValueError):
    """Not enough rows to fit the requested model."""


class NumericalFailureError(QwlearnError, RuntimeError):
    """A numerical routine failed to converge or produced non-finite values."""


class TrainingFailureError(NumericalFailureError):
    """Training diverged; carries the epoch and batch where it happened."""

    def __init__(self, message, epoch=None, batch=None):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


class ModelParseError(QwlearnError, ValueError):
    """A model file is malformed or of an unknown type."""


class DatasetParseError(QwlearnError, ValueError):
    """A dataset file is malformed; carries the offending line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
