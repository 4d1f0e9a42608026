from __future__ import annotations

import numpy as np
import pytest

from esai.common import InvalidArgumentError
from esai.events import EventStream
from esai.refocus import WarpParam, apse

T_REF = 350_000


@pytest.fixture()
def window_stream() -> EventStream:
    """700 events spaced 1 ms apart across a 0.7 s window centred on ``T_REF``."""

    offsets = (np.arange(350) + 0.5) * 1000
    t = np.sort(np.concatenate((T_REF - offsets, T_REF + offsets))).astype(np.int64)
    zeros = np.zeros(t.size, dtype=np.int64)
    return EventStream(t, zeros, zeros, np.ones(t.size, dtype=np.int64), (1, 1), (0, 700_000))


def test_exact_estimate_has_zero_error(window_stream: EventStream) -> None:
    truth = WarpParam((94.4, -3.0), T_REF)

    assert apse(truth, truth, window_stream) == 0.0


def test_unit_error_over_symmetric_window(window_stream: EventStream) -> None:
    estimate = WarpParam((95.4, 0.0), T_REF)
    truth = WarpParam((94.4, 0.0), T_REF)

    assert apse(estimate, truth, window_stream) == pytest.approx(0.175, abs=1e-9)


def test_error_norm_combines_axes(window_stream: EventStream) -> None:
    truth = WarpParam((0.0, 0.0), T_REF)

    horizontal = apse(WarpParam((3.0, 0.0), T_REF), truth, window_stream)
    diagonal = apse(WarpParam((3.0, 4.0), T_REF), truth, window_stream)

    assert horizontal == pytest.approx(3 * 0.175, abs=1e-9)
    assert diagonal == pytest.approx(5 * 0.175, abs=1e-9)


def test_behaves_as_metric_in_psi(window_stream: EventStream) -> None:
    a = WarpParam((10.0, 2.0), T_REF)
    b = WarpParam((-4.0, 7.5), T_REF)
    c = WarpParam((1.0, -1.0), T_REF)

    assert apse(a, b, window_stream) == pytest.approx(apse(b, a, window_stream))
    assert apse(a, c, window_stream) <= apse(a, b, window_stream) + apse(b, c, window_stream) + 1e-12


def test_empty_stream_is_rejected() -> None:
    truth = WarpParam((1.0, 0.0), 0)

    with pytest.raises(InvalidArgumentError):
        apse(truth, truth, EventStream.empty((2, 2), (0, 10)))
