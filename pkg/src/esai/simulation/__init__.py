"""Synthetic occluded-scene event simulator with ground-truth labels."""

from .builder import (
    OCCLUDER_KINDS,
    build_scene,
    corpus_configs,
    simulate_from_config,
    synthetic_corpus,
)
from .emulator import export_sample, measure_occlusion_density, simulate_events
from .scene import (
    OccluderSegment,
    OccluderSpec,
    SceneSpec,
    Trajectory,
    make_cardboard_occluder,
    make_fence_occluder,
    make_stripe_occluder,
    make_texture,
    render_view,
)

__all__ = [
    "OCCLUDER_KINDS",
    "OccluderSegment",
    "OccluderSpec",
    "SceneSpec",
    "Trajectory",
    "build_scene",
    "corpus_configs",
    "export_sample",
    "make_cardboard_occluder",
    "make_fence_occluder",
    "make_stripe_occluder",
    "make_texture",
    "measure_occlusion_density",
    "render_view",
    "simulate_events",
    "simulate_from_config",
    "synthetic_corpus",
]
