"""Exception hierarchy shared by every ESAI subpackage."""

from __future__ import annotations


class EsaiError(RuntimeError):
    """Base class for toolkit failures surfaced to the command line."""

    exit_code = 2


class InvalidArgumentError(ValueError):
    """Raised when an operation receives arguments outside its domain."""


class DataError(EsaiError):
    """Raised for malformed inputs: files, samples, configs and checkpoints."""

    exit_code = 2


class NumericError(EsaiError):
    """Raised when a numerical procedure fails to produce finite results."""

    exit_code = 3


class EventFormatError(DataError):
    """Raised when an event file cannot be parsed.

    The message always names the line (CSV) or byte offset (binary) at fault.
    """


class ResolutionError(DataError):
    """Raised when an event lies outside the declared sensor resolution."""

    def __init__(
        self,
        index: int,
        x: int,
        y: int,
        resolution: tuple[int, int],
        *,
        location: str | None = None,
    ) -> None:
        width, height = resolution
        message = f"event {index} at (x={x}, y={y}) outside resolution {width}x{height}"
        super().__init__(message if location is None else f"{location}: {message}")
        self.index = index
        self.x = x
        self.y = y


class SampleFormatError(DataError):
    """Raised when a dataset sample directory is incomplete or inconsistent."""


class ConfigError(DataError):
    """Raised when a key=value or YAML config file is invalid."""


class CheckpointError(DataError):
    """Raised when a parameter checkpoint cannot be read or written."""


class SimulationError(DataError):
    """Raised when the scene simulator cannot honour its sampling precondition."""


class PoseLookupError(DataError):
    """Raised when a camera pose is unavailable for an event timestamp."""


class RunReportError(DataError):
    """Raised when sweep run directories are missing or incomplete."""


class TrainingDivergedError(NumericError):
    """Raised when the training loss stops being finite."""

    def __init__(self, epoch: int, loss: float) -> None:
        super().__init__(f"training diverged at epoch {epoch}: loss={loss}")
        self.epoch = epoch


__all__ = [
    "CheckpointError",
    "ConfigError",
    "DataError",
    "EsaiError",
    "EventFormatError",
    "InvalidArgumentError",
    "NumericError",
    "PoseLookupError",
    "ResolutionError",
    "RunReportError",
    "SampleFormatError",
    "SimulationError",
    "TrainingDivergedError",
]
