"""Event file readers and writers (CSV text and the ``ESAI`` binary container)."""

from __future__ import annotations

import csv
import logging
import struct
from pathlib import Path
from typing import Literal

import numpy as np

from esai.common.errors import DataError, EventFormatError, InvalidArgumentError, ResolutionError
from esai.events.types import EventStream, Resolution

LOGGER = logging.getLogger(__name__)

EventFileFormat = Literal["csv", "bin"]

CSV_HEADER = ("t", "x", "y", "p")
BINARY_MAGIC = b"ESAI"
BINARY_VERSION = 1
BINARY_HEADER = struct.Struct("<4sHHHHI")
BINARY_RECORD = np.dtype([("t", "<u8"), ("x", "<u2"), ("y", "<u2"), ("p", "i1")])


def infer_format(path: Path | str) -> EventFileFormat:
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix == ".bin":
        return "bin"
    raise InvalidArgumentError(f"cannot infer event file format from suffix {suffix!r}")


def read_events(
    path: Path | str,
    format: EventFileFormat | None = None,
    *,
    resolution: Resolution | None = None,
) -> EventStream:
    """Load an event stream from ``path``.

    Binary files carry their own resolution. CSV files take ``resolution`` from
    the caller; when it is omitted the smallest frame containing every event is
    used.
    """

    path = Path(path)
    file_format = format or infer_format(path)
    if not path.exists():
        raise DataError(f"{path}: event file not found")
    if file_format == "csv":
        stream = _read_csv(path, resolution)
    elif file_format == "bin":
        stream = _read_binary(path, resolution)
    else:
        raise InvalidArgumentError(f"unsupported event file format {file_format!r}")
    LOGGER.info("Read %d events from %s", len(stream), path)
    return stream


def write_events(
    stream: EventStream, path: Path | str, format: EventFileFormat | None = None
) -> None:
    """Write ``stream`` to ``path`` in the requested format."""

    path = Path(path)
    file_format = format or infer_format(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        if file_format == "csv":
            _write_csv(stream, path)
        elif file_format == "bin":
            _write_binary(stream, path)
        else:
            raise InvalidArgumentError(f"unsupported event file format {file_format!r}")
    except OSError as exc:
        raise DataError(f"{path}: failed to write events ({exc})") from exc
    LOGGER.info("Wrote %d events to %s", len(stream), path)


def _read_csv(path: Path, resolution: Resolution | None) -> EventStream:
    columns: list[list[int]] = [[], [], [], []]
    lines: list[int] = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(cell.strip() for cell in header) != CSV_HEADER:
            raise EventFormatError(f"{path}: line 1: expected header 't,x,y,p', got {header!r}")
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 4:
                raise EventFormatError(f"{path}: line {line}: expected 4 fields, got {len(row)}")
            try:
                t, x, y, p = (int(cell) for cell in row)
            except ValueError as exc:
                raise EventFormatError(f"{path}: line {line}: non-integer field in {row!r}") from exc
            if p not in (1, -1):
                raise EventFormatError(f"{path}: line {line}: polarity must be 1 or -1, got {p}")
            if t < 0:
                raise EventFormatError(f"{path}: line {line}: negative timestamp {t}")
            for column, value in zip(columns, (t, x, y, p)):
                column.append(value)
            lines.append(line)

    t, x, y, p = (np.asarray(column, dtype=np.int64) for column in columns)
    if resolution is None:
        resolution = (int(x.max()) + 1, int(y.max()) + 1) if x.size else (1, 1)
        LOGGER.debug("Inferred resolution %s for %s", resolution, path)
    _check_csv_rows(path, np.asarray(lines), t, x, y, resolution)
    return _build_stream(path, t, x, y, p, resolution)


def _check_csv_rows(
    path: Path,
    lines: np.ndarray,
    t: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    resolution: Resolution,
) -> None:
    """Report ordering and bounds violations by their CSV line."""

    decreasing = np.flatnonzero(np.diff(t) < 0)
    if decreasing.size:
        index = int(decreasing[0]) + 1
        raise EventFormatError(
            f"{path}: line {int(lines[index])}: timestamp {int(t[index])} precedes {int(t[index - 1])}"
        )
    width, height = resolution
    outside = np.flatnonzero((x < 0) | (x >= width) | (y < 0) | (y >= height))
    if outside.size:
        index = int(outside[0])
        raise ResolutionError(
            index, int(x[index]), int(y[index]), resolution, location=f"{path}: line {int(lines[index])}"
        )


def _write_csv(stream: EventStream, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for t, x, y, p in zip(
            stream.t.tolist(), stream.x.tolist(), stream.y.tolist(), stream.p.tolist()
        ):
            writer.writerow((t, x, y, p))


def _read_binary(path: Path, resolution: Resolution | None) -> EventStream:
    payload = path.read_bytes()
    if len(payload) < BINARY_HEADER.size:
        raise EventFormatError(
            f"{path}: truncated header at byte offset {len(payload)} "
            f"(need {BINARY_HEADER.size} bytes)"
        )
    magic, version, width, height, _reserved, count = BINARY_HEADER.unpack_from(payload)
    if magic != BINARY_MAGIC:
        raise EventFormatError(f"{path}: byte offset 0: bad magic {magic!r}")
    if version != BINARY_VERSION:
        raise EventFormatError(f"{path}: byte offset 4: unsupported version {version}")
    if resolution is not None and tuple(resolution) != (width, height):
        raise EventFormatError(
            f"{path}: header resolution {width}x{height} differs from expected {resolution}"
        )

    body = payload[BINARY_HEADER.size :]
    complete = len(body) // BINARY_RECORD.itemsize
    if len(body) % BINARY_RECORD.itemsize:
        offset = BINARY_HEADER.size + complete * BINARY_RECORD.itemsize
        raise EventFormatError(f"{path}: truncated record at byte offset {offset}")
    if complete != count:
        offset = BINARY_HEADER.size + complete * BINARY_RECORD.itemsize
        raise EventFormatError(
            f"{path}: header declares {count} events but {complete} records end at byte offset {offset}"
        )

    records = np.frombuffer(body, dtype=BINARY_RECORD, count=complete)
    t = records["t"].astype(np.int64)
    x = records["x"].astype(np.int64)
    y = records["y"].astype(np.int64)
    p = records["p"].astype(np.int64)
    bad = np.flatnonzero((p != 1) & (p != -1))
    if bad.size:
        index = int(bad[0])
        offset = BINARY_HEADER.size + index * BINARY_RECORD.itemsize
        raise EventFormatError(f"{path}: byte offset {offset}: polarity {int(p[index])} is not +1/-1")
    return _build_stream(path, t, x, y, p, (width, height))


def _write_binary(stream: EventStream, path: Path) -> None:
    width, height = stream.resolution
    if width > 0xFFFF or height > 0xFFFF:
        raise InvalidArgumentError(f"resolution {stream.resolution} exceeds the u16 header fields")
    header = BINARY_HEADER.pack(BINARY_MAGIC, BINARY_VERSION, width, height, 0, len(stream))
    records = np.empty(len(stream), dtype=BINARY_RECORD)
    records["t"] = stream.t
    records["x"] = stream.x
    records["y"] = stream.y
    records["p"] = stream.p
    with path.open("wb") as handle:
        handle.write(header)
        handle.write(records.tobytes())


def _build_stream(
    path: Path,
    t: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    p: np.ndarray,
    resolution: Resolution,
) -> EventStream:
    try:
        return EventStream(t, x, y, p, resolution)
    except EventFormatError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


__all__ = ["EventFileFormat", "infer_format", "read_events", "write_events"]
