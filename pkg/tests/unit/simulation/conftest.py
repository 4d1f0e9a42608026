from __future__ import annotations

from typing import Callable

import pytest

from esai.simulation import (
    OccluderSpec,
    SceneSpec,
    Trajectory,
    make_fence_occluder,
    make_texture,
)
from esai.simulation.scene import texture_shape_for

SceneFactory = Callable[..., tuple[SceneSpec, Trajectory]]


@pytest.fixture()
def small_scene() -> SceneFactory:
    """A 16x32 fence scene swept for 0.1 s; keyword arguments override parts of it."""

    def factory(
        *,
        texture: str = "blobs",
        contrast: float = 0.6,
        occluder: OccluderSpec | None = None,
        occluder_intensity: float = 0.15,
        noise_rate: float = 0.0,
        v: float = 0.177,
        duration_us: int = 100_000,
        resolution: tuple[int, int] = (16, 32),
    ) -> tuple[SceneSpec, Trajectory]:
        trajectory = Trajectory(v=(v, 0.0), t_span=(0, duration_us))
        shape = texture_shape_for(resolution, trajectory, 320.0, 320.0, 0.6)
        if occluder is None:
            occluder = make_fence_occluder(
                0.5, 4, span=float(resolution[1]), intensity=occluder_intensity
            )
        scene = SceneSpec(
            target_texture=make_texture(texture, shape, contrast=contrast, scale=3.0, seed=4),
            occluder=occluder,
            depth=0.6,
            occluder_depth=0.2,
            fx=320.0,
            fy=320.0,
            resolution=resolution,
            eta=0.2,
            noise_rate=noise_rate,
        )
        return scene, trajectory

    return factory
