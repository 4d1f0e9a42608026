"""Build simulator scenes and synthetic corpora from :class:`SceneConfig`."""

from __future__ import annotations

import dataclasses
import logging
from pathlib import Path
from typing import Sequence

import numpy as np

from esai.common.errors import InvalidArgumentError
from esai.common.raster import read_pgm
from esai.config import SceneConfig
from esai.events.types import US_PER_SECOND, DatasetSample, GrayImage, LabeledEventStream
from esai.simulation.emulator import simulate_events
from esai.simulation.scene import (
    TEXTURE_KINDS,
    OccluderSpec,
    SceneSpec,
    Trajectory,
    make_cardboard_occluder,
    make_fence_occluder,
    make_stripe_occluder,
    make_texture,
    texture_shape_for,
)

LOGGER = logging.getLogger(__name__)

OCCLUDER_KINDS = ("none", "fence", "cardboard", "stripes")
R_T_TOLERANCE = 1e-9


def build_trajectory(config: SceneConfig) -> Trajectory:
    end = int(round(config.duration * US_PER_SECOND))
    if end <= 0:
        raise InvalidArgumentError(f"duration must be positive, got {config.duration}")
    return Trajectory(
        v=(config.v, config.v_y),
        t_span=(0, end),
        t_ref=config.t_ref,
        sample_rate=config.sample_rate,
    )


def build_occluder(config: SceneConfig) -> OccluderSpec:
    span = float(config.width if config.orientation == "vertical" else config.height)
    if config.r_t and config.occluder != "stripes":
        raise InvalidArgumentError(
            f"r_t={config.r_t} needs the stripes occluder, got {config.occluder!r}"
        )
    if config.occluder == "none":
        return OccluderSpec.empty(config.orientation)
    if config.occluder == "fence":
        return make_fence_occluder(
            config.r_o,
            config.slat_count,
            config.orientation,
            span=span,
            intensity=config.occluder_intensity,
            intensity_jitter=config.occluder_jitter,
            seed=config.seed,
        )
    if config.occluder == "stripes":
        return make_stripe_occluder(
            config.r_o, config.slat_count, stripe_count(config), config.orientation, span=span
        )
    if config.occluder == "cardboard":
        return make_cardboard_occluder(
            _parse_slits(config.slits),
            span=span,
            intensity=config.occluder_intensity,
            orientation=config.orientation,
        )
    raise InvalidArgumentError(
        f"unknown occluder {config.occluder!r}; expected one of {OCCLUDER_KINDS}"
    )


def stripe_count(config: SceneConfig) -> int:
    """Stripes per slat; an ``r_t`` setting maps to ``2 r_t + 1`` stripes."""

    if config.r_t is None:
        return config.stripes
    stripes = int(round(2 * config.r_t + 1))
    if stripes < 1 or abs((stripes - 1) / 2 - config.r_t) > R_T_TOLERANCE:
        raise InvalidArgumentError(f"r_t must be a non-negative multiple of 1/2, got {config.r_t}")
    if config.stripes not in (1, stripes):
        raise InvalidArgumentError(
            f"r_t={config.r_t} implies {stripes} stripes but stripes={config.stripes}"
        )
    return stripes


def build_texture(config: SceneConfig, trajectory: Trajectory) -> GrayImage:
    if config.texture in TEXTURE_KINDS:
        shape = texture_shape_for(
            (config.height, config.width), trajectory, config.fx, config.fy, config.depth
        )
        return make_texture(
            config.texture,
            shape,
            mean=config.texture_mean,
            contrast=config.texture_contrast,
            scale=config.texture_scale,
            seed=config.texture_seed,
        )
    pixels = read_pgm(Path(config.texture))
    return GrayImage(pixels.astype(np.float64), (0.0, 255.0))


def build_scene(config: SceneConfig) -> tuple[SceneSpec, Trajectory]:
    """Return the scene and trajectory described by ``config``."""

    trajectory = build_trajectory(config)
    scene = SceneSpec(
        target_texture=build_texture(config, trajectory),
        occluder=build_occluder(config),
        depth=config.depth,
        occluder_depth=config.occluder_depth,
        fx=config.fx,
        fy=config.fy,
        resolution=(config.height, config.width),
        eta=config.eta,
        noise_rate=config.noise_rate,
    )
    return scene, trajectory


def simulate_from_config(config: SceneConfig) -> tuple[LabeledEventStream, DatasetSample]:
    scene, trajectory = build_scene(config)
    return simulate_events(scene, trajectory, seed=config.seed)


def corpus_configs(
    base: SceneConfig,
    count: int,
    *,
    seed: int = 0,
    r_o_range: tuple[float, float] | None = None,
    v_range: tuple[float, float] | None = None,
) -> list[SceneConfig]:
    """Derive ``count`` scene variants of ``base`` with fresh textures.

    Occlusion ratio and speed are drawn uniformly when ranges are given.
    """

    if count < 1:
        raise InvalidArgumentError(f"count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    configs = []
    for index in range(count):
        changes: dict[str, object] = {
            "texture_seed": int(rng.integers(0, 2**31 - 1)),
            "seed": base.seed + index,
        }
        if r_o_range is not None:
            changes["r_o"] = float(rng.uniform(*r_o_range))
        if v_range is not None:
            changes["v"] = float(rng.uniform(*v_range))
        configs.append(dataclasses.replace(base, **changes))
    return configs


def synthetic_corpus(configs: Sequence[SceneConfig]) -> list[DatasetSample]:
    samples = []
    for index, config in enumerate(configs):
        _, sample = simulate_from_config(config)
        samples.append(sample)
        LOGGER.debug("Corpus scene %d/%d: %d events", index + 1, len(configs), len(sample.events))
    LOGGER.info("Simulated corpus of %d scenes", len(samples))
    return samples


def _parse_slits(text: str) -> list[tuple[float, float]]:
    slits = []
    for item in filter(None, (part.strip() for part in text.split(","))):
        start, _, width = item.partition(":")
        try:
            slits.append((float(start), float(width)))
        except ValueError as exc:
            raise InvalidArgumentError(f"slit must be start:width, got {item!r}") from exc
    if not slits:
        raise InvalidArgumentError("cardboard occluder needs slits=start:width[,start:width...]")
    return slits


__all__ = [
    "OCCLUDER_KINDS",
    "build_occluder",
    "build_scene",
    "build_texture",
    "build_trajectory",
    "corpus_configs",
    "simulate_from_config",
    "stripe_count",
    "synthetic_corpus",
]
