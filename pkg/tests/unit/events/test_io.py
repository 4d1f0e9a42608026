from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from esai.common import DataError, EventFormatError, InvalidArgumentError, ResolutionError
from esai.events import EventStream, infer_format, read_events, write_events
from esai.events.io import BINARY_HEADER, BINARY_RECORD


@pytest.mark.parametrize("suffix", [".bin", ".csv"])
def test_round_trip_is_bit_identical(tmp_path: Path, make_stream, suffix: str) -> None:
    stream = make_stream(1_000, (64, 48), seed=11)
    path = tmp_path / f"events{suffix}"

    write_events(stream, path)
    loaded = read_events(path, resolution=(64, 48))

    np.testing.assert_array_equal(loaded.t, stream.t)
    np.testing.assert_array_equal(loaded.x, stream.x)
    np.testing.assert_array_equal(loaded.y, stream.y)
    np.testing.assert_array_equal(loaded.p, stream.p)
    assert loaded.resolution == (64, 48)


@settings(max_examples=50, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(
    rows=st.lists(
        st.tuples(
            st.integers(0, 2**40),
            st.integers(0, 345),
            st.integers(0, 259),
            st.sampled_from([-1, 1]),
        ),
        max_size=40,
    )
)
def test_binary_round_trip_for_random_streams(tmp_path: Path, rows) -> None:
    rows = sorted(rows)
    columns = np.array(rows, dtype=np.int64).reshape(-1, 4).T
    stream = EventStream(*columns, (346, 260))
    path = tmp_path / "random.bin"

    write_events(stream, path)

    assert read_events(path) == EventStream(*columns, (346, 260))


def test_csv_polarity_zero_is_a_parse_error(tmp_path: Path) -> None:
    path = tmp_path / "bad.csv"
    path.write_text("t,x,y,p\n10,1,1,1\n11,2,2,0\n", encoding="utf-8")

    with pytest.raises(EventFormatError, match="line 3"):
        read_events(path)


def test_csv_requires_header(tmp_path: Path) -> None:
    path = tmp_path / "headless.csv"
    path.write_text("10,1,1,1\n", encoding="utf-8")

    with pytest.raises(EventFormatError, match="line 1"):
        read_events(path)


def test_csv_errors_name_the_file_line_not_the_event_index(tmp_path: Path) -> None:
    path = tmp_path / "gappy.csv"
    path.write_text("t,x,y,p\n\n10,1,1,1\n\n20,2,2,-1\n15,3,3,1\n", encoding="utf-8")

    with pytest.raises(EventFormatError, match="line 6: timestamp 15 precedes 20"):
        read_events(path)


def test_csv_pixel_outside_resolution_names_its_line(tmp_path: Path) -> None:
    path = tmp_path / "wide.csv"
    path.write_text("t,x,y,p\n\n10,1,1,1\n\n11,9,1,1\n", encoding="utf-8")

    with pytest.raises(ResolutionError, match=r"line 5: event 1 at \(x=9, y=1\)"):
        read_events(path, resolution=(8, 4))


def test_csv_without_resolution_uses_bounding_frame(tmp_path: Path) -> None:
    path = tmp_path / "small.csv"
    path.write_text("t,x,y,p\n1,4,2,1\n2,0,0,-1\n", encoding="utf-8")

    assert read_events(path).resolution == (5, 3)


def test_truncated_binary_reports_byte_offset(tmp_path: Path) -> None:
    stream = EventStream([1, 2, 3], [0, 1, 2], [0, 0, 0], [1, -1, 1], (4, 4))
    path = tmp_path / "events.bin"
    write_events(stream, path)
    path.write_bytes(path.read_bytes()[:-5])

    offset = BINARY_HEADER.size + 2 * BINARY_RECORD.itemsize
    with pytest.raises(EventFormatError, match=f"byte offset {offset}"):
        read_events(path)


def test_binary_with_bad_magic(tmp_path: Path) -> None:
    path = tmp_path / "events.bin"
    path.write_bytes(b"NOPE" + bytes(12))

    with pytest.raises(EventFormatError, match="bad magic"):
        read_events(path)


def test_binary_resolution_mismatch(tmp_path: Path) -> None:
    path = tmp_path / "events.bin"
    write_events(EventStream.empty((4, 4)), path)

    with pytest.raises(EventFormatError, match="differs"):
        read_events(path, resolution=(8, 8))


def test_empty_stream_has_header_only(tmp_path: Path) -> None:
    path = tmp_path / "empty.bin"
    write_events(EventStream.empty((10, 5)), path)

    assert path.stat().st_size == BINARY_HEADER.size
    assert len(read_events(path)) == 0


def test_missing_file_and_unknown_suffix(tmp_path: Path) -> None:
    with pytest.raises(DataError, match="not found"):
        read_events(tmp_path / "absent.bin")
    with pytest.raises(InvalidArgumentError):
        infer_format("events.aedat4")
