"""Domain types for event streams, frame stacks, images and dataset samples."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator, Mapping

import numpy as np

from esai.common.errors import EventFormatError, InvalidArgumentError, ResolutionError

Resolution = tuple[int, int]
"""Sensor resolution as ``(width, height)`` in pixels."""

US_PER_SECOND = 1_000_000


def _frozen(array: np.ndarray, dtype: np.dtype | type) -> np.ndarray:
    frozen = np.array(array, dtype=dtype, copy=True)
    frozen.setflags(write=False)
    return frozen


@dataclass(frozen=True)
class Event:
    """A single brightness-change record."""

    t: int
    x: int
    y: int
    p: int

    def __post_init__(self) -> None:
        if self.p not in (1, -1):
            raise InvalidArgumentError(f"polarity must be +1 or -1, got {self.p}")
        if self.t < 0:
            raise InvalidArgumentError(f"timestamp must be non-negative, got {self.t}")


@dataclass(frozen=True, eq=False)
class EventStream:
    """Time-sorted events of one sensor, stored column-wise.

    ``t`` holds integer microseconds, ``x``/``y`` integer pixel coordinates and
    ``p`` the polarity (+1/-1). Arrays are read-only once constructed.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    p: np.ndarray
    resolution: Resolution
    t_span: tuple[int, int] = (0, 0)

    def __post_init__(self) -> None:
        t = _frozen(self.t, np.int64)
        x = _frozen(self.x, np.int64)
        y = _frozen(self.y, np.int64)
        p = _frozen(self.p, np.int8)
        if not (t.ndim == x.ndim == y.ndim == p.ndim == 1):
            raise InvalidArgumentError("event columns must be one-dimensional")
        if not (t.size == x.size == y.size == p.size):
            raise InvalidArgumentError("event columns must have equal lengths")
        width, height = (int(value) for value in self.resolution)
        if width <= 0 or height <= 0:
            raise InvalidArgumentError(f"invalid resolution {self.resolution}")
        _validate_columns(t, x, y, p, (width, height))
        span = self.t_span
        if t.size and span == (0, 0):
            span = (int(t[0]), int(t[-1]))
        span = (int(span[0]), int(span[1]))
        if span[0] > span[1]:
            raise InvalidArgumentError(f"inverted time span {span}")
        if t.size and (t[0] < span[0] or t[-1] > span[1]):
            raise InvalidArgumentError(
                f"events [{int(t[0])}, {int(t[-1])}] fall outside time span {span}"
            )
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "resolution", (width, height))
        object.__setattr__(self, "t_span", span)

    @classmethod
    def empty(cls, resolution: Resolution, t_span: tuple[int, int] = (0, 0)) -> "EventStream":
        none = np.zeros(0, dtype=np.int64)
        return cls(none, none, none, none.astype(np.int8), resolution, t_span)

    @classmethod
    def from_events(
        cls,
        events: list[Event] | tuple[Event, ...],
        resolution: Resolution,
        t_span: tuple[int, int] = (0, 0),
    ) -> "EventStream":
        if not events:
            return cls.empty(resolution, t_span)
        return cls(
            np.array([event.t for event in events]),
            np.array([event.x for event in events]),
            np.array([event.y for event in events]),
            np.array([event.p for event in events]),
            resolution,
            t_span,
        )

    @property
    def width(self) -> int:
        return self.resolution[0]

    @property
    def height(self) -> int:
        return self.resolution[1]

    def __len__(self) -> int:
        return int(self.t.size)

    def __iter__(self) -> Iterator[Event]:
        for t, x, y, p in zip(self.t, self.x, self.y, self.p):
            yield Event(int(t), int(x), int(y), int(p))

    def __getitem__(self, index: int) -> Event:
        return Event(int(self.t[index]), int(self.x[index]), int(self.y[index]), int(self.p[index]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventStream):
            return NotImplemented
        return (
            self.resolution == other.resolution
            and self.t_span == other.t_span
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.p, other.p)
        )

    __hash__ = None  # type: ignore[assignment]

    def select(self, keep: np.ndarray) -> "EventStream":
        """Return the events where ``keep`` is true, preserving order and span."""

        keep = np.asarray(keep, dtype=bool)
        return EventStream(
            self.t[keep], self.x[keep], self.y[keep], self.p[keep], self.resolution, self.t_span
        )

    def shifted(self, offset_us: int) -> "EventStream":
        """Return the stream with ``offset_us`` subtracted from every timestamp."""

        start, end = self.t_span
        return EventStream(
            self.t - offset_us,
            self.x,
            self.y,
            self.p,
            self.resolution,
            (start - offset_us, end - offset_us),
        )

    def to_subpixel(self) -> "SubpixelEventStream":
        return SubpixelEventStream(self.t, self.x, self.y, self.p, self.resolution, self.t_span)


@dataclass(frozen=True, eq=False)
class SubpixelEventStream:
    """Event stream whose coordinates are real-valued and not clipped to the frame."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    p: np.ndarray
    resolution: Resolution
    t_span: tuple[int, int] = (0, 0)

    def __post_init__(self) -> None:
        t = _frozen(self.t, np.int64)
        x = _frozen(self.x, np.float64)
        y = _frozen(self.y, np.float64)
        p = _frozen(self.p, np.int8)
        if not (t.size == x.size == y.size == p.size):
            raise InvalidArgumentError("event columns must have equal lengths")
        if t.size > 1 and np.any(np.diff(t) < 0):
            raise InvalidArgumentError("subpixel events must be sorted by timestamp")
        span = self.t_span
        if t.size and tuple(span) == (0, 0):
            span = (int(t[0]), int(t[-1]))
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "resolution", tuple(int(v) for v in self.resolution))
        object.__setattr__(self, "t_span", (int(span[0]), int(span[1])))

    @property
    def width(self) -> int:
        return self.resolution[0]

    @property
    def height(self) -> int:
        return self.resolution[1]

    def __len__(self) -> int:
        return int(self.t.size)

    def select(self, keep: np.ndarray) -> "SubpixelEventStream":
        keep = np.asarray(keep, dtype=bool)
        return SubpixelEventStream(
            self.t[keep], self.x[keep], self.y[keep], self.p[keep], self.resolution, self.t_span
        )

    def to_pixels(self) -> EventStream:
        """Round to the nearest pixel and drop events that leave the frame."""

        column = np.floor(self.x + 0.5).astype(np.int64)
        row = np.floor(self.y + 0.5).astype(np.int64)
        width, height = self.resolution
        inside = (column >= 0) & (column < width) & (row >= 0) & (row < height)
        return EventStream(
            self.t[inside], column[inside], row[inside], self.p[inside], self.resolution, self.t_span
        )


class EventCategory(IntEnum):
    """Source of a simulated event (target edge, occluder edge, mixed, sensor noise)."""

    AA = 0
    OO = 1
    OA = 2
    NOISE = 3


@dataclass(frozen=True, eq=False)
class LabeledEventStream:
    """An event stream with one :class:`EventCategory` per event."""

    stream: EventStream
    labels: np.ndarray

    def __post_init__(self) -> None:
        labels = _frozen(self.labels, np.int8)
        if labels.shape != (len(self.stream),):
            raise InvalidArgumentError(
                f"expected {len(self.stream)} labels, got {labels.shape[0] if labels.ndim else 0}"
            )
        object.__setattr__(self, "labels", labels)

    def count(self, category: EventCategory) -> int:
        return int(np.count_nonzero(self.labels == int(category)))

    def of(self, category: EventCategory) -> EventStream:
        return self.stream.select(self.labels == int(category))


@dataclass(frozen=True, eq=False)
class FrameStack:
    """Event counts binned into ``N`` time intervals and two polarity channels.

    ``data`` has shape (N, 2, H, W); channel 0 holds positive and channel 1
    negative events.
    """

    data: np.ndarray
    t_edges: np.ndarray

    def __post_init__(self) -> None:
        data = _frozen(self.data, np.float64)
        edges = _frozen(self.t_edges, np.float64)
        if data.ndim != 4 or data.shape[1] != 2:
            raise InvalidArgumentError(f"frame stack must have shape (N, 2, H, W), got {data.shape}")
        if edges.shape != (data.shape[0] + 1,):
            raise InvalidArgumentError("t_edges must hold N + 1 timestamps")
        if np.any(np.diff(edges) <= 0):
            raise InvalidArgumentError("t_edges must be strictly increasing")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "t_edges", edges)

    @property
    def intervals(self) -> int:
        return int(self.data.shape[0])

    @property
    def size(self) -> tuple[int, int]:
        return int(self.data.shape[2]), int(self.data.shape[3])


@dataclass(frozen=True, eq=False)
class GrayImage:
    """A single-channel real-valued image of shape (H, W)."""

    data: np.ndarray
    range_hint: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self) -> None:
        data = _frozen(self.data, np.float64)
        if data.ndim != 2:
            raise InvalidArgumentError(f"gray images must be 2-D, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InvalidArgumentError("gray images must contain finite values only")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "range_hint", (float(self.range_hint[0]), float(self.range_hint[1])))

    @property
    def shape(self) -> tuple[int, int]:
        return int(self.data.shape[0]), int(self.data.shape[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.range_hint == other.range_hint and np.array_equal(self.data, other.data)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class TimedFrame:
    """An APS frame together with its exposure timestamp (µs)."""

    image: GrayImage
    timestamp: int


@dataclass(frozen=True)
class DatasetSample:
    """One scene of the dataset: metadata, event stream and APS frames.

    ``size`` is (H, W). ``extra`` keeps optional metadata keys (for example
    ``t_ref`` or ``fy``) verbatim so that save/load is lossless.
    """

    v: float
    fx: float
    size: tuple[int, int]
    depth: float
    events: EventStream
    occ_aps: tuple[TimedFrame, ...]
    occ_free_aps: TimedFrame
    t_offset: int = 0
    extra: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        height, width = self.size
        if self.events.resolution != (width, height):
            raise InvalidArgumentError(
                f"event resolution {self.events.resolution} does not match size {self.size}"
            )
        object.__setattr__(self, "occ_aps", tuple(self.occ_aps))
        object.__setattr__(self, "extra", dict(sorted(self.extra.items())))


def _validate_columns(
    t: np.ndarray, x: np.ndarray, y: np.ndarray, p: np.ndarray, resolution: Resolution
) -> None:
    if t.size == 0:
        return
    bad_polarity = np.flatnonzero((p != 1) & (p != -1))
    if bad_polarity.size:
        index = int(bad_polarity[0])
        raise EventFormatError(f"event {index}: polarity must be +1 or -1, got {int(p[index])}")
    if np.any(t < 0):
        index = int(np.flatnonzero(t < 0)[0])
        raise EventFormatError(f"event {index}: negative timestamp {int(t[index])}")
    decreasing = np.flatnonzero(np.diff(t) < 0)
    if decreasing.size:
        index = int(decreasing[0]) + 1
        raise EventFormatError(f"event {index}: timestamps are not sorted")
    width, height = resolution
    outside = np.flatnonzero((x < 0) | (x >= width) | (y < 0) | (y >= height))
    if outside.size:
        index = int(outside[0])
        raise ResolutionError(index, int(x[index]), int(y[index]), resolution)


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
]
