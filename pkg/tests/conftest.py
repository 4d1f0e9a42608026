from __future__ import annotations

from typing import Callable

import numpy as np
import pytest

from esai.events import EventStream

StreamFactory = Callable[..., EventStream]


@pytest.fixture()
def make_stream() -> StreamFactory:
    """Random sorted event streams with a fixed seed per call."""

    def factory(
        count: int,
        resolution: tuple[int, int] = (32, 24),
        *,
        duration: int = 100_000,
        seed: int = 0,
    ) -> EventStream:
        rng = np.random.default_rng(seed)
        width, height = resolution
        t = np.sort(rng.integers(0, duration + 1, size=count))
        x = rng.integers(0, width, size=count)
        y = rng.integers(0, height, size=count)
        p = rng.choice(np.array([-1, 1]), size=count)
        return EventStream(t, x, y, p, resolution, (0, duration))

    return factory
