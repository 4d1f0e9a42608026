"""Shared helpers: error types, raster I/O and runtime settings."""

from .errors import (
    CheckpointError,
    ConfigError,
    DataError,
    EsaiError,
    EventFormatError,
    InvalidArgumentError,
    NumericError,
    PoseLookupError,
    ResolutionError,
    RunReportError,
    SampleFormatError,
    SimulationError,
    TrainingDivergedError,
)

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
