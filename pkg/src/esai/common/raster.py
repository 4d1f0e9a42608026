"""Raster file helpers: 8-bit binary PGM frames and little-endian ``.f32`` grids."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from esai.common.errors import DataError, InvalidArgumentError

LOGGER = logging.getLogger(__name__)

F32_HEADER_DTYPE = np.dtype("<u4")
F32_DATA_DTYPE = np.dtype("<f4")


def read_pgm(path: Path | str) -> np.ndarray:
    """Read an 8-bit grayscale PGM file into a ``uint8`` array of shape (H, W)."""

    path = Path(path)
    try:
        with Image.open(path) as image:
            if image.mode != "L":
                raise DataError(f"{path}: expected 8-bit grayscale PGM, got mode {image.mode}")
            return np.array(image, dtype=np.uint8)
    except FileNotFoundError as exc:
        raise DataError(f"{path}: file not found") from exc
    except (UnidentifiedImageError, OSError) as exc:
        raise DataError(f"{path}: not a readable PGM image ({exc})") from exc


def write_pgm(path: Path | str, pixels: np.ndarray) -> None:
    """Write a ``uint8`` (H, W) array as binary PGM (P5)."""

    path = Path(path)
    array = np.asarray(pixels)
    if array.ndim != 2 or array.dtype != np.uint8:
        raise InvalidArgumentError("PGM frames must be 2-D uint8 arrays")
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        Image.fromarray(array).save(path, format="PPM")
    except OSError as exc:
        raise DataError(f"{path}: failed to write PGM ({exc})") from exc


def scale_to_uint8(values: np.ndarray) -> np.ndarray:
    """Min-max scale a real-valued raster to the 0..255 range."""

    data = np.asarray(values, dtype=np.float64)
    low = float(data.min()) if data.size else 0.0
    high = float(data.max()) if data.size else 0.0
    if high <= low:
        return np.zeros(data.shape, dtype=np.uint8)
    scaled = (data - low) / (high - low) * 255.0
    return np.rint(scaled).astype(np.uint8)


def write_f32_grid(path: Path | str, values: np.ndarray) -> None:
    """Write a 2-D grid as ``u32 rows, u32 cols`` followed by row-major f32 data."""

    path = Path(path)
    grid = np.asarray(values)
    if grid.ndim != 2:
        raise InvalidArgumentError("f32 grids must be two-dimensional")
    header = np.array(grid.shape, dtype=F32_HEADER_DTYPE)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as handle:
        handle.write(header.tobytes())
        handle.write(np.ascontiguousarray(grid, dtype=F32_DATA_DTYPE).tobytes())


def read_f32_grid(path: Path | str) -> np.ndarray:
    """Read a grid written by :func:`write_f32_grid`."""

    path = Path(path)
    try:
        payload = path.read_bytes()
    except FileNotFoundError as exc:
        raise DataError(f"{path}: file not found") from exc
    if len(payload) < 8:
        raise DataError(f"{path}: truncated f32 header at byte offset {len(payload)}")
    rows, cols = (int(value) for value in np.frombuffer(payload[:8], dtype=F32_HEADER_DTYPE))
    expected = 8 + rows * cols * F32_DATA_DTYPE.itemsize
    if len(payload) != expected:
        raise DataError(
            f"{path}: expected {expected} bytes for a {rows}x{cols} grid, found {len(payload)}"
        )
    return np.frombuffer(payload[8:], dtype=F32_DATA_DTYPE).reshape(rows, cols).copy()


__all__ = [
    "read_f32_grid",
    "read_pgm",
    "scale_to_uint8",
    "write_f32_grid",
    "write_pgm",
]
