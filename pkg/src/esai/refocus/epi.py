"""Event epipolar-plane images: one sensor row over time-as-viewpoint."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from esai.common.errors import InvalidArgumentError
from esai.common.raster import scale_to_uint8, write_f32_grid, write_pgm
from esai.events.types import EventStream, SubpixelEventStream

EPI_MODES = ("merged", "signed")


@dataclass(frozen=True, eq=False)
class EpiImage:
    """Event counts of one row, shape (theta_bins, W)."""

    data: np.ndarray
    row: int
    mode: str = "merged"

    def __post_init__(self) -> None:
        if self.mode not in EPI_MODES:
            raise InvalidArgumentError(f"mode must be one of {EPI_MODES}, got {self.mode!r}")
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise InvalidArgumentError("EPI data must be 2-D (theta_bins, W)")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)


def epi_slice(
    stream: EventStream | SubpixelEventStream,
    row: int,
    theta_bins: int,
    mode: str = "merged",
) -> EpiImage:
    """Bin events of ``row`` into (time bin, column) cells."""

    width, height = stream.resolution
    if not 0 <= row < height:
        raise InvalidArgumentError(f"row {row} outside 0..{height - 1}")
    if theta_bins < 1:
        raise InvalidArgumentError(f"theta_bins must be positive, got {theta_bins}")
    if mode not in EPI_MODES:
        raise InvalidArgumentError(f"mode must be one of {EPI_MODES}, got {mode!r}")

    rows = np.floor(np.asarray(stream.y, dtype=np.float64) + 0.5).astype(np.int64)
    columns = np.floor(np.asarray(stream.x, dtype=np.float64) + 0.5).astype(np.int64)
    keep = (rows == row) & (columns >= 0) & (columns < width)
    start, end = stream.t_span
    t = stream.t[keep]
    if end > start:
        bins = np.minimum((t - start) * theta_bins // (end - start), theta_bins - 1)
    else:
        bins = np.zeros_like(t)
    weights = stream.p[keep].astype(np.float64) if mode == "signed" else np.ones(t.size)
    flat = bins * width + columns[keep]
    data = np.bincount(flat, weights=weights, minlength=theta_bins * width)
    return EpiImage(data.reshape(theta_bins, width), row, mode)


def epi_verticality(
    x: np.ndarray, trajectories: np.ndarray, tolerance: float = 0.5
) -> float:
    """Fraction of events within ``tolerance`` px of their trajectory's mean x."""

    x = np.asarray(x, dtype=np.float64)
    trajectories = np.asarray(trajectories)
    if x.size == 0:
        return 0.0
    _, inverse = np.unique(trajectories, return_inverse=True)
    means = np.bincount(inverse, weights=x) / np.bincount(inverse)
    return float(np.mean(np.abs(x - means[inverse]) <= tolerance))


def write_epi(epi: EpiImage, path: Path | str) -> None:
    """Write ``epi`` as a min-max scaled PGM or, for ``.f32`` paths, a float grid."""

    path = Path(path)
    if path.suffix.lower() == ".f32":
        write_f32_grid(path, epi.data)
    else:
        write_pgm(path, scale_to_uint8(epi.data))


__all__ = ["EPI_MODES", "EpiImage", "epi_slice", "epi_verticality", "write_epi"]
