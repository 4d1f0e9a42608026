from __future__ import annotations

from typing import Callable

import numpy as np
import pytest

from esai.events import EventStream

PointStreamFactory = Callable[..., tuple[EventStream, np.ndarray]]


@pytest.fixture()
def moving_points() -> PointStreamFactory:
    """Events of integer-positioned scene points drifting at ``-psi`` px/s.

    Returns the stream and the scene-point id of every event. The reference
    time is the midpoint of the (0, duration) span, so warping by ``psi``
    puts every event back within half a pixel of its point.
    """

    def factory(
        psi: float,
        points: int = 24,
        events_per_point: int = 60,
        *,
        resolution: tuple[int, int] = (64, 16),
        duration: int = 100_000,
        seed: int = 0,
    ) -> tuple[EventStream, np.ndarray]:
        rng = np.random.default_rng(seed)
        width, height = resolution
        margin = int(np.ceil(abs(psi) * duration / 2_000_000)) + 2
        x0 = rng.integers(margin, width - margin, size=points)
        y0 = rng.integers(0, height, size=points)
        ids = np.repeat(np.arange(points), events_per_point)
        t = rng.integers(0, duration + 1, size=ids.size)
        seconds = (t - duration // 2) / 1_000_000
        x = np.floor(x0[ids] - psi * seconds + 0.5).astype(np.int64)
        order = np.argsort(t, kind="stable")
        p = rng.choice(np.array([-1, 1]), size=ids.size)
        stream = EventStream(
            t[order], x[order], y0[ids][order], p[order], resolution, (0, duration)
        )
        return stream, ids[order]

    return factory
