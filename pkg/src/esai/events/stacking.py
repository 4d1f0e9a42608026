"""Binning of event streams into frame stacks and related image helpers."""

from __future__ import annotations

import logging

import numpy as np

from esai.common.errors import InvalidArgumentError
from esai.events.types import EventStream, FrameStack, GrayImage, SubpixelEventStream

LOGGER = logging.getLogger(__name__)


def pixel_coordinates(
    stream: EventStream | SubpixelEventStream,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return integer (column, row) coordinates and an in-frame mask.

    Subpixel coordinates are rounded half-up to the nearest pixel.
    """

    if isinstance(stream, SubpixelEventStream):
        column = np.floor(stream.x + 0.5).astype(np.int64)
        row = np.floor(stream.y + 0.5).astype(np.int64)
    else:
        column = np.asarray(stream.x, dtype=np.int64)
        row = np.asarray(stream.y, dtype=np.int64)
    width, height = stream.resolution
    inside = (column >= 0) & (column < width) & (row >= 0) & (row < height)
    return column, row, inside


def stack_events(
    stream: EventStream | SubpixelEventStream,
    intervals: int,
    window: tuple[int, int],
) -> FrameStack:
    """Bin events into ``intervals`` equal-width time slices and two polarity channels.

    Each slice is half-open ``[edge_i, edge_{i+1})`` except the last, which also
    includes ``window[1]``. Events outside the window or the frame are ignored.
    """

    if intervals < 1:
        raise InvalidArgumentError(f"interval count must be positive, got {intervals}")
    start, end = int(window[0]), int(window[1])
    if start >= end:
        raise InvalidArgumentError(f"window start {start} must precede end {end}")

    width, height = stream.resolution
    column, row, inside = pixel_coordinates(stream)
    t = np.asarray(stream.t, dtype=np.int64)
    keep = inside & (t >= start) & (t <= end)
    dropped = int(np.count_nonzero(~inside))
    if dropped:
        LOGGER.debug("Ignoring %d events outside the %dx%d frame", dropped, width, height)

    bins = ((t[keep] - start) * intervals) // (end - start)
    bins = np.minimum(bins, intervals - 1)
    channel = np.where(stream.p[keep] > 0, 0, 1)
    flat = ((bins * 2 + channel) * height + row[keep]) * width + column[keep]
    counts = np.bincount(flat, minlength=intervals * 2 * height * width)
    data = counts.reshape(intervals, 2, height, width).astype(np.float64)
    edges = np.linspace(float(start), float(end), intervals + 1)
    return FrameStack(data=data, t_edges=edges)


def split_polarity(stream: EventStream) -> tuple[EventStream, EventStream]:
    """Split a stream into its positive and negative events, keeping order."""

    positive = stream.p > 0
    return stream.select(positive), stream.select(~positive)


def normalize_minmax(image: GrayImage) -> GrayImage:
    """Affinely map an image onto [0, 1]; constant images map to zeros."""

    data = image.data
    if data.size == 0:
        return GrayImage(data.copy(), (0.0, 1.0))
    low = float(data.min())
    high = float(data.max())
    if high <= low:
        return GrayImage(np.zeros_like(data), (0.0, 1.0))
    return GrayImage((data - low) / (high - low), (0.0, 1.0))


__all__ = ["normalize_minmax", "pixel_coordinates", "split_polarity", "stack_events"]
