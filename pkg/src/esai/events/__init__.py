"""Event-stream domain types, binning and file I/O."""

from .dataset import frame_to_unit, load_sample, save_sample
from .io import infer_format, read_events, write_events
from .stacking import normalize_minmax, pixel_coordinates, split_polarity, stack_events
from .types import (
    US_PER_SECOND,
    DatasetSample,
    Event,
    EventCategory,
    EventStream,
    FrameStack,
    GrayImage,
    LabeledEventStream,
    Resolution,
    SubpixelEventStream,
    TimedFrame,
)

__all__ = [
    "DatasetSample",
    "Event",
    "EventCategory",
    "EventStream",
    "FrameStack",
    "GrayImage",
    "LabeledEventStream",
    "Resolution",
    "SubpixelEventStream",
    "TimedFrame",
    "US_PER_SECOND",
    "frame_to_unit",
    "infer_format",
    "load_sample",
    "normalize_minmax",
    "pixel_coordinates",
    "read_events",
    "save_sample",
    "split_polarity",
    "stack_events",
    "write_events",
]
