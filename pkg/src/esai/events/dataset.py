"""Dataset sample directories: metadata, event stream and APS frames.

Layout::

    meta.txt                  key=value lines (v, fx, size, depth, ...)
    events.bin                ESAI binary event file
    occ_aps/frame_0000.pgm    occluded APS frames (8-bit P5)
    occ_aps_ts.txt            one timestamp (µs) per occluded frame
    occ_free_aps.pgm          occlusion-free reference frame
    occ_free_aps_ts.txt       its timestamp (µs)
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict

import numpy as np

from esai.common.errors import DataError, SampleFormatError
from esai.common.raster import read_pgm, write_pgm
from esai.events.io import read_events, write_events
from esai.events.types import DatasetSample, EventStream, GrayImage, TimedFrame

LOGGER = logging.getLogger(__name__)

META_FILENAME = "meta.txt"
EVENTS_FILENAME = "events.bin"
OCC_APS_DIRECTORY = "occ_aps"
OCC_APS_PATTERN = "frame_%04d.pgm"
OCC_APS_TIMESTAMPS = "occ_aps_ts.txt"
OCC_FREE_FILENAME = "occ_free_aps.pgm"
OCC_FREE_TIMESTAMP = "occ_free_aps_ts.txt"

REQUIRED_META_KEYS = ("v", "fx", "size", "depth")
SPAN_META_KEYS = ("t_start", "t_end", "t_offset")
DEFAULT_FRAME_PERIOD_US = 1_000_000 // 30


def load_sample(directory: Path | str) -> DatasetSample:
    """Load a dataset sample and re-zero its timestamps.

    The stream start (``t_start`` in the metadata, else the first event) becomes
    time zero; the removed offset accumulates in :attr:`DatasetSample.t_offset`.
    """

    directory = Path(directory)
    if not directory.is_dir():
        raise SampleFormatError(f"{directory}: sample directory not found")

    meta = _read_meta(directory / META_FILENAME)
    for key in REQUIRED_META_KEYS:
        if key not in meta:
            raise SampleFormatError(f"missing key: {key}")
    size = _parse_size(meta["size"])
    height, width = size

    events_path = directory / EVENTS_FILENAME
    if not events_path.exists():
        raise SampleFormatError("missing key: events")
    events = read_events(events_path, "bin", resolution=(width, height))

    free_path = directory / OCC_FREE_FILENAME
    free_ts_path = directory / OCC_FREE_TIMESTAMP
    if not free_path.exists() or not free_ts_path.exists():
        raise SampleFormatError("missing key: occ_free_aps")
    free_timestamps = _read_timestamps(free_ts_path)
    if len(free_timestamps) != 1:
        raise SampleFormatError(
            f"{free_ts_path}: expected exactly one timestamp, found {len(free_timestamps)}"
        )
    free_image = _read_frame(free_path, size)

    occ_timestamps_path = directory / OCC_APS_TIMESTAMPS
    frames_dir = directory / OCC_APS_DIRECTORY
    if not occ_timestamps_path.exists() or not frames_dir.is_dir():
        raise SampleFormatError("missing key: occ_aps")
    occ_timestamps = _read_timestamps(occ_timestamps_path)
    frame_paths = sorted(frames_dir.glob("frame_*.pgm"))
    if len(frame_paths) != len(occ_timestamps):
        raise SampleFormatError(
            f"{directory}: {len(frame_paths)} occluded frames but {len(occ_timestamps)} timestamps"
        )
    occ_images = [_read_frame(path, size) for path in frame_paths]

    start = int(meta["t_start"]) if "t_start" in meta else (int(events.t[0]) if len(events) else 0)
    end = int(meta["t_end"]) if "t_end" in meta else (int(events.t[-1]) if len(events) else start)
    if len(events) and (events.t[0] < start or events.t[-1] > end):
        raise SampleFormatError(
            f"{directory}: events [{int(events.t[0])}, {int(events.t[-1])}] outside t_start/t_end [{start}, {end}]"
        )
    events = EventStream(events.t, events.x, events.y, events.p, events.resolution, (start, end))
    shifted = events.shifted(start)
    offset = int(meta.get("t_offset", "0")) + start

    occ_aps = tuple(
        TimedFrame(image=image, timestamp=timestamp - start)
        for image, timestamp in zip(occ_images, occ_timestamps)
    )
    occ_free = TimedFrame(image=free_image, timestamp=free_timestamps[0] - start)
    _check_frame_times(directory, shifted, occ_aps)

    extra = {
        key: value
        for key, value in meta.items()
        if key not in REQUIRED_META_KEYS and key not in SPAN_META_KEYS
    }
    sample = DatasetSample(
        v=float(meta["v"]),
        fx=float(meta["fx"]),
        size=size,
        depth=float(meta["depth"]),
        events=shifted,
        occ_aps=occ_aps,
        occ_free_aps=occ_free,
        t_offset=offset,
        extra=extra,
    )
    LOGGER.info(
        "Loaded sample %s: %d events, %d occluded frames, offset %d us",
        directory,
        len(shifted),
        len(occ_aps),
        offset,
    )
    return sample


def save_sample(sample: DatasetSample, directory: Path | str) -> None:
    """Write ``sample`` using the dataset directory layout."""

    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        frames_dir = directory / OCC_APS_DIRECTORY
        frames_dir.mkdir(exist_ok=True)
        for stale in frames_dir.glob("frame_*.pgm"):
            stale.unlink()

        height, width = sample.size
        meta: Dict[str, str] = {
            "v": repr(float(sample.v)),
            "fx": repr(float(sample.fx)),
            "size": f"{height},{width}",
            "depth": repr(float(sample.depth)),
            "t_start": str(sample.events.t_span[0]),
            "t_end": str(sample.events.t_span[1]),
            "t_offset": str(sample.t_offset),
        }
        meta.update(sample.extra)
        lines = [f"{key}={value}" for key, value in meta.items()]
        (directory / META_FILENAME).write_text("\n".join(lines) + "\n", encoding="utf-8")

        write_events(sample.events, directory / EVENTS_FILENAME, "bin")
        for index, frame in enumerate(sample.occ_aps):
            write_pgm(frames_dir / (OCC_APS_PATTERN % index), _frame_pixels(frame.image))
        (directory / OCC_APS_TIMESTAMPS).write_text(
            "".join(f"{frame.timestamp}\n" for frame in sample.occ_aps), encoding="utf-8"
        )
        write_pgm(directory / OCC_FREE_FILENAME, _frame_pixels(sample.occ_free_aps.image))
        (directory / OCC_FREE_TIMESTAMP).write_text(
            f"{sample.occ_free_aps.timestamp}\n", encoding="utf-8"
        )
    except OSError as exc:
        raise DataError(f"{directory}: failed to write sample ({exc})") from exc
    LOGGER.info("Saved sample with %d events to %s", len(sample.events), directory)


def frame_to_unit(image: GrayImage) -> np.ndarray:
    """Return frame intensities scaled to [0, 1] according to the range hint."""

    low, high = image.range_hint
    if high <= low:
        return np.zeros_like(image.data)
    return np.clip((image.data - low) / (high - low), 0.0, 1.0)


def _frame_pixels(image: GrayImage) -> np.ndarray:
    unit = frame_to_unit(image)
    return np.rint(unit * 255.0).astype(np.uint8)


def _read_frame(path: Path, size: tuple[int, int]) -> GrayImage:
    pixels = read_pgm(path)
    if pixels.shape != size:
        raise SampleFormatError(f"{path}: frame size {pixels.shape} does not match size {size}")
    return GrayImage(pixels.astype(np.float64), (0.0, 255.0))


def _read_meta(path: Path) -> Dict[str, str]:
    if not path.exists():
        raise SampleFormatError(f"missing key: meta ({path} not found)")
    meta: Dict[str, str] = {}
    for number, raw_line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SampleFormatError(f"{path}: line {number}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        meta[key] = value
    return meta


def _parse_size(value: str) -> tuple[int, int]:
    parts = value.replace("x", ",").split(",")
    try:
        height, width = (int(part) for part in parts)
    except ValueError as exc:
        raise SampleFormatError(f"invalid size {value!r}; expected 'H,W'") from exc
    if height <= 0 or width <= 0:
        raise SampleFormatError(f"invalid size {value!r}")
    return height, width


def _read_timestamps(path: Path) -> list[int]:
    values: list[int] = []
    for number, raw_line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw_line.strip()
        if not line:
            continue
        try:
            values.append(int(line))
        except ValueError as exc:
            raise SampleFormatError(f"{path}: line {number}: invalid timestamp {line!r}") from exc
    return values


def _check_frame_times(
    directory: Path, events: EventStream, frames: tuple[TimedFrame, ...]
) -> None:
    if not len(events) or not frames:
        return
    stamps = np.array([frame.timestamp for frame in frames], dtype=np.int64)
    period = int(np.min(np.diff(stamps))) if stamps.size > 1 else DEFAULT_FRAME_PERIOD_US
    start, end = events.t_span
    outside = np.flatnonzero((stamps < start - period) | (stamps > end + period))
    if outside.size:
        index = int(outside[0])
        raise SampleFormatError(
            f"{directory}: occluded frame {index} at {int(stamps[index])} us lies outside "
            f"the event span [{start}, {end}]"
        )


__all__ = ["frame_to_unit", "load_sample", "save_sample"]
