from __future__ import annotations

from typing import Callable

import numpy as np
import pytest

from esai.events import FrameStack, GrayImage

ExampleFactory = Callable[..., list[tuple[FrameStack, GrayImage]]]


@pytest.fixture()
def tiny_examples() -> ExampleFactory:
    """Random frame stacks paired with smooth truth images."""

    def factory(
        count: int = 4, intervals: int = 3, size: tuple[int, int] = (8, 8), *, seed: int = 0
    ) -> list[tuple[FrameStack, GrayImage]]:
        rng = np.random.default_rng(seed)
        height, width = size
        ramp = np.add.outer(np.linspace(0.2, 0.6, height), np.linspace(0.0, 0.3, width))
        examples = []
        for _ in range(count):
            data = rng.integers(0, 3, size=(intervals, 2, height, width)).astype(np.float64)
            stack = FrameStack(data, np.linspace(0.0, 30_000.0, intervals + 1))
            truth = GrayImage(np.clip(ramp + rng.uniform(-0.05, 0.05), 0.0, 1.0), (0.0, 1.0))
            examples.append((stack, truth))
        return examples

    return factory
