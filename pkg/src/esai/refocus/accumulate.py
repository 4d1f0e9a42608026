"""Polarity-blind event accumulation and focus measures."""

from __future__ import annotations

import numpy as np

from esai.common.errors import InvalidArgumentError
from esai.events.types import EventStream, GrayImage, Resolution, SubpixelEventStream

VOTING_MODES = ("nearest", "bilinear")
FOCUS_METRICS = ("variance", "density", "combined")
DEFAULT_TAU = 1.0


def accumulate_coordinates(
    x: np.ndarray, y: np.ndarray, resolution: Resolution, voting: str = "nearest"
) -> np.ndarray:
    """Count image (H, W) of real-valued event positions; off-frame votes are dropped."""

    width, height = resolution
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if voting == "nearest":
        columns = np.floor(x + 0.5).astype(np.int64)
        rows = np.floor(y + 0.5).astype(np.int64)
        return _vote(rows, columns, np.ones_like(x), width, height)
    if voting == "bilinear":
        left = np.floor(x)
        top = np.floor(y)
        dx, dy = x - left, y - top
        left, top = left.astype(np.int64), top.astype(np.int64)
        counts = np.zeros(height * width)
        for row_step, column_step, weight in (
            (0, 0, (1 - dx) * (1 - dy)),
            (0, 1, dx * (1 - dy)),
            (1, 0, (1 - dx) * dy),
            (1, 1, dx * dy),
        ):
            counts += _vote(top + row_step, left + column_step, weight, width, height).ravel()
        return counts.reshape(height, width)
    raise InvalidArgumentError(f"voting must be one of {VOTING_MODES}, got {voting!r}")


def accumulate(
    stream: EventStream | SubpixelEventStream,
    resolution: Resolution | None = None,
    voting: str = "nearest",
) -> GrayImage:
    """Count events per pixel ignoring polarity."""

    resolution = stream.resolution if resolution is None else resolution
    counts = accumulate_coordinates(stream.x, stream.y, resolution, voting)
    peak = float(counts.max()) if counts.size else 0.0
    return GrayImage(counts, (0.0, max(peak, 1.0)))


def focus_score(counts: GrayImage | np.ndarray, metric: str = "combined", tau: float = DEFAULT_TAU) -> float:
    """Sharpness of a count image: variance, fraction of pixels >= ``tau``, or their product."""

    data = counts.data if isinstance(counts, GrayImage) else np.asarray(counts, dtype=np.float64)
    if metric == "variance":
        return float(np.var(data))
    if metric == "density":
        return float(np.mean(data >= tau))
    if metric == "combined":
        return float(np.var(data)) * float(np.mean(data >= tau))
    raise InvalidArgumentError(f"metric must be one of {FOCUS_METRICS}, got {metric!r}")


def _vote(
    rows: np.ndarray, columns: np.ndarray, weights: np.ndarray, width: int, height: int
) -> np.ndarray:
    inside = (columns >= 0) & (columns < width) & (rows >= 0) & (rows < height)
    flat = rows[inside] * width + columns[inside]
    counts = np.bincount(flat, weights=weights[inside], minlength=width * height)
    return counts.reshape(height, width)


__all__ = [
    "DEFAULT_TAU",
    "FOCUS_METRICS",
    "VOTING_MODES",
    "accumulate",
    "accumulate_coordinates",
    "focus_score",
]
