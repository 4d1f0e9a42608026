from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from esai.common import SampleFormatError
from esai.events import (
    DatasetSample,
    EventStream,
    GrayImage,
    TimedFrame,
    frame_to_unit,
    load_sample,
    save_sample,
)


def _frame(size: tuple[int, int], value: int, timestamp: int) -> TimedFrame:
    return TimedFrame(GrayImage(np.full(size, float(value)), (0.0, 255.0)), timestamp)


def _sample(
    size: tuple[int, int] = (260, 346), *, events: EventStream | None = None, t_offset: int = 0
) -> DatasetSample:
    height, width = size
    if events is None:
        events = EventStream(
            [0, 40_000, 90_000],
            [0, min(10, width - 1), width - 1],
            [0, min(5, height - 1), height - 1],
            [1, -1, 1],
            (width, height),
            (0, 100_000),
        )
    return DatasetSample(
        v=0.177,
        fx=320.0,
        size=size,
        depth=0.6,
        events=events,
        occ_aps=(_frame(size, 10, 0), _frame(size, 20, 33_333), _frame(size, 30, 66_666)),
        occ_free_aps=_frame(size, 128, 50_000),
        t_offset=t_offset,
        extra={"t_ref": "50000", "occluder": "fence"},
    )


def test_fields_are_reproduced_exactly(tmp_path: Path) -> None:
    sample = _sample(t_offset=1_234)

    save_sample(sample, tmp_path / "sample")
    loaded = load_sample(tmp_path / "sample")

    assert loaded.v == 0.177
    assert loaded.size == (260, 346)
    assert loaded.depth == 0.6
    assert loaded.t_offset == 1_234
    assert loaded == sample


def test_load_re_zeroes_timestamps(tmp_path: Path) -> None:
    events = EventStream([500, 900], [0, 1], [0, 0], [1, 1], (2, 2), (400, 1_000))
    sample = DatasetSample(
        v=0.1,
        fx=100.0,
        size=(2, 2),
        depth=1.0,
        events=events,
        occ_aps=(_frame((2, 2), 0, 450),),
        occ_free_aps=_frame((2, 2), 0, 700),
    )
    save_sample(sample, tmp_path)

    loaded = load_sample(tmp_path)

    assert loaded.events.t.tolist() == [100, 500]
    assert loaded.events.t_span == (0, 600)
    assert loaded.t_offset == 400
    assert loaded.occ_aps[0].timestamp == 50
    assert loaded.occ_free_aps.timestamp == 300


def test_missing_occlusion_free_frame(tmp_path: Path) -> None:
    save_sample(_sample((4, 6)), tmp_path)
    (tmp_path / "occ_free_aps.pgm").unlink()

    with pytest.raises(SampleFormatError, match="missing key: occ_free_aps"):
        load_sample(tmp_path)


def test_missing_meta_key(tmp_path: Path) -> None:
    save_sample(_sample((4, 6)), tmp_path)
    meta = tmp_path / "meta.txt"
    lines = [line for line in meta.read_text().splitlines() if not line.startswith("depth=")]
    meta.write_text("\n".join(lines) + "\n")

    with pytest.raises(SampleFormatError, match="missing key: depth"):
        load_sample(tmp_path)


def test_frame_count_must_match_timestamps(tmp_path: Path) -> None:
    save_sample(_sample((4, 6)), tmp_path)
    (tmp_path / "occ_aps" / "frame_0002.pgm").unlink()

    with pytest.raises(SampleFormatError, match="2 occluded frames but 3 timestamps"):
        load_sample(tmp_path)


def test_frames_far_outside_event_span_are_rejected(tmp_path: Path) -> None:
    sample = _sample((4, 6))
    save_sample(sample, tmp_path)
    (tmp_path / "occ_aps_ts.txt").write_text("0\n33333\n900000\n")

    with pytest.raises(SampleFormatError, match="occluded frame 2"):
        load_sample(tmp_path)


def test_saving_again_replaces_stale_frames(tmp_path: Path) -> None:
    save_sample(_sample((4, 6)), tmp_path)
    smaller = DatasetSample(
        v=0.177,
        fx=320.0,
        size=(4, 6),
        depth=0.6,
        events=EventStream.empty((6, 4), (0, 10)),
        occ_aps=(),
        occ_free_aps=_frame((4, 6), 1, 5),
    )

    save_sample(smaller, tmp_path)

    assert load_sample(tmp_path) == smaller


def test_frame_to_unit_uses_range_hint() -> None:
    image = GrayImage(np.array([[0.0, 51.0, 255.0]]), (0.0, 255.0))

    np.testing.assert_allclose(frame_to_unit(image), [[0.0, 0.2, 1.0]])


def test_small_sensor_sample_round_trips(tmp_path: Path) -> None:
    sample = _sample((4, 6))

    save_sample(sample, tmp_path)

    assert load_sample(tmp_path) == sample
    assert int(sample.events.x.max()) == 5
    assert int(sample.events.y.max()) == 3
