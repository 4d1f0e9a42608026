"""Planar occluded scenes: target texture, occluder profile and trajectory.

The camera translates fronto-parallel to two planes. A pixel at column ``x``
observes target texel ``x + fx * cam_x / depth`` and occluder coordinate
``x + fx * cam_x / occluder_depth`` (rows likewise with ``fy``/``cam_y``), both
measured from where the optical axis through the principal point meets the plane.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import ndimage

from esai.common.errors import InvalidArgumentError
from esai.events.types import US_PER_SECOND, GrayImage

LOGGER = logging.getLogger(__name__)

INTENSITY_FLOOR = 1.0 / 255.0
DEFAULT_ETA = 0.2
DEFAULT_SAMPLE_RATE = 10_000.0
ORIENTATIONS = ("vertical", "horizontal")
TEXTURE_KINDS = ("blobs", "checker", "gradient", "constant", "bars")


@dataclass(frozen=True)
class OccluderSegment:
    """One band of a periodic occluder profile; ``intensity`` is None for open bands."""

    width: float
    intensity: float | None = None

    @property
    def occluded(self) -> bool:
        return self.intensity is not None


@dataclass(frozen=True)
class OccluderSpec:
    """Periodic occluder profile along one image axis.

    ``vertical`` occluders (upright slats) vary along x, ``horizontal`` ones
    along y. Widths are in pixels at the reference viewpoint.
    """

    kind: str
    orientation: str = "vertical"
    segments: tuple[OccluderSegment, ...] = ()
    phase: float = 0.0
    r_t: float = 0.0

    def __post_init__(self) -> None:
        if self.orientation not in ORIENTATIONS:
            raise InvalidArgumentError(
                f"orientation must be one of {ORIENTATIONS}, got {self.orientation!r}"
            )
        segments = tuple(self.segments)
        if any(segment.width < 0 for segment in segments):
            raise InvalidArgumentError("occluder segment widths must be non-negative")
        if segments and self.period <= 0:
            raise InvalidArgumentError("occluder period must be positive")
        for segment in segments:
            if segment.occluded and not 0.0 <= float(segment.intensity) <= 1.0:
                raise InvalidArgumentError(
                    f"occluder intensity must lie in [0, 1], got {segment.intensity}"
                )
        if self.r_t < 0:
            raise InvalidArgumentError(f"r_t must be non-negative, got {self.r_t}")
        object.__setattr__(self, "segments", segments)

    @classmethod
    def empty(cls, orientation: str = "vertical") -> "OccluderSpec":
        return cls(kind="none", orientation=orientation)

    @property
    def period(self) -> float:
        return float(sum(segment.width for segment in self.segments))

    @property
    def r_o(self) -> float:
        """Occluded fraction of one period."""

        if not self.segments:
            return 0.0
        covered = sum(segment.width for segment in self.segments if segment.occluded)
        return float(covered / self.period)

    @property
    def is_empty(self) -> bool:
        return self.r_o == 0.0

    def footprint(self, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(coverage, intensity_integral)`` of 1-px footprints at ``centers``.

        ``coverage`` is the occluded fraction of ``[c - 0.5, c + 0.5]`` and
        ``intensity_integral`` the occluder intensity integrated over it.
        """

        centers = np.asarray(centers, dtype=np.float64)
        if self.is_empty:
            zeros = np.zeros_like(centers)
            return zeros, zeros.copy()
        widths = np.array([segment.width for segment in self.segments])
        occluded = np.array([segment.occluded for segment in self.segments], dtype=np.float64)
        levels = np.array([segment.intensity or 0.0 for segment in self.segments])
        edges = np.concatenate(([0.0], np.cumsum(widths)))
        covered = np.concatenate(([0.0], np.cumsum(widths * occluded)))
        integral = np.concatenate(([0.0], np.cumsum(widths * occluded * levels)))

        def cumulative(table: np.ndarray, positions: np.ndarray) -> np.ndarray:
            turns, rest = np.divmod(positions - self.phase, self.period)
            return turns * table[-1] + np.interp(rest, edges, table)

        upper, lower = centers + 0.5, centers - 0.5
        coverage = np.clip(cumulative(covered, upper) - cumulative(covered, lower), 0.0, 1.0)
        intensity = cumulative(integral, upper) - cumulative(integral, lower)
        return coverage, np.clip(intensity, 0.0, 1.0)


@dataclass(frozen=True)
class SceneSpec:
    """A textured target plane behind a planar occluder, seen by a pinhole camera."""

    target_texture: GrayImage
    occluder: OccluderSpec
    depth: float
    occluder_depth: float
    fx: float
    fy: float
    resolution: tuple[int, int]
    principal_point: tuple[float, float] | None = None
    eta: float = DEFAULT_ETA
    noise_rate: float = 0.0

    def __post_init__(self) -> None:
        height, width = (int(value) for value in self.resolution)
        if height <= 0 or width <= 0:
            raise InvalidArgumentError(f"invalid resolution {self.resolution}")
        if not 0.0 < self.occluder_depth < self.depth:
            raise InvalidArgumentError(
                f"depths must satisfy 0 < occluder_depth < depth, got {self.occluder_depth} and {self.depth}"
            )
        if self.eta <= 0:
            raise InvalidArgumentError(f"eta must be positive, got {self.eta}")
        if self.noise_rate < 0:
            raise InvalidArgumentError(f"noise_rate must be non-negative, got {self.noise_rate}")
        if self.fx <= 0 or self.fy <= 0:
            raise InvalidArgumentError("focal lengths must be positive")
        texture = self.target_texture
        if np.any(texture.data < 0.0):
            raise InvalidArgumentError("target texture intensities must be non-negative")
        if texture.range_hint != (0.0, 1.0):
            texture = GrayImage(_to_unit(texture), (0.0, 1.0))
        principal = self.principal_point
        if principal is None:
            principal = ((width - 1) / 2.0, (height - 1) / 2.0)
        object.__setattr__(self, "target_texture", texture)
        object.__setattr__(self, "resolution", (height, width))
        object.__setattr__(self, "principal_point", (float(principal[0]), float(principal[1])))

    @property
    def height(self) -> int:
        return self.resolution[0]

    @property
    def width(self) -> int:
        return self.resolution[1]

    def without_occluder(self) -> "SceneSpec":
        return SceneSpec(
            target_texture=self.target_texture,
            occluder=OccluderSpec.empty(self.occluder.orientation),
            depth=self.depth,
            occluder_depth=self.occluder_depth,
            fx=self.fx,
            fy=self.fy,
            resolution=self.resolution,
            principal_point=self.principal_point,
            eta=self.eta,
            noise_rate=self.noise_rate,
        )


@dataclass(frozen=True)
class Trajectory:
    """Uniform fronto-parallel camera motion.

    ``v`` is (v_x, v_y) in m/s; times are µs. The camera sits at the origin at
    ``t_ref``.
    """

    v: tuple[float, float]
    t_span: tuple[int, int]
    t_ref: int | None = None
    sample_rate: float = DEFAULT_SAMPLE_RATE
    kind: str = field(default="fronto-parallel uniform", init=False)

    def __post_init__(self) -> None:
        start, end = (int(value) for value in self.t_span)
        t_ref = (start + end) // 2 if self.t_ref is None else int(self.t_ref)
        if not start <= t_ref <= end:
            raise InvalidArgumentError(f"t_ref {t_ref} outside trajectory span {(start, end)}")
        if self.sample_rate <= 0:
            raise InvalidArgumentError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "v", (float(self.v[0]), float(self.v[1])))
        object.__setattr__(self, "t_span", (start, end))
        object.__setattr__(self, "t_ref", t_ref)

    @property
    def duration(self) -> int:
        return self.t_span[1] - self.t_span[0]

    def position(self, t_us: float | np.ndarray) -> tuple[float, float]:
        """Camera offset (meters) at ``t_us``."""

        seconds = (np.asarray(t_us, dtype=np.float64) - self.t_ref) / US_PER_SECOND
        return self.v[0] * seconds, self.v[1] * seconds


def render_coverage(scene: SceneSpec, cam_x: float, cam_y: float) -> tuple[np.ndarray, np.ndarray]:
    """Render linear intensity and per-pixel occluder coverage at a camera offset."""

    height, width = scene.resolution
    texture = scene.target_texture.data
    tex_height, tex_width = texture.shape
    # The optical axis meets the texture centre and occluder coordinate (W - 1) / 2.
    axis_x = scene.principal_point[0] - (width - 1) / 2.0
    axis_y = scene.principal_point[1] - (height - 1) / 2.0
    shift_x = scene.fx * cam_x / scene.depth + (tex_width - width) / 2.0 - axis_x
    shift_y = scene.fy * cam_y / scene.depth + (tex_height - height) / 2.0 - axis_y
    rows, cols = np.mgrid[0:height, 0:width].astype(np.float64)
    target = ndimage.map_coordinates(
        texture, [rows + shift_y, cols + shift_x], order=1, mode="nearest"
    )

    occluder = scene.occluder
    if occluder.is_empty:
        return target, np.zeros_like(target)
    if occluder.orientation == "vertical":
        centers = np.arange(width, dtype=np.float64) - axis_x + scene.fx * cam_x / scene.occluder_depth
        coverage, integral = occluder.footprint(centers)
        coverage = np.broadcast_to(coverage[np.newaxis, :], (height, width))
        integral = np.broadcast_to(integral[np.newaxis, :], (height, width))
    else:
        centers = np.arange(height, dtype=np.float64) - axis_y + scene.fy * cam_y / scene.occluder_depth
        coverage, integral = occluder.footprint(centers)
        coverage = np.broadcast_to(coverage[:, np.newaxis], (height, width))
        integral = np.broadcast_to(integral[:, np.newaxis], (height, width))
    intensity = integral + (1.0 - coverage) * target
    return intensity, np.array(coverage)


def render_view(scene: SceneSpec, cam_x: float, cam_y: float) -> tuple[GrayImage, np.ndarray]:
    """Render the occluded view and its binary occlusion mask."""

    intensity, coverage = render_coverage(scene, cam_x, cam_y)
    return GrayImage(intensity, (0.0, 1.0)), coverage >= 0.5


def make_fence_occluder(
    r_o: float,
    slat_count: int,
    orientation: str = "vertical",
    *,
    span: float = 346.0,
    intensity: float = 0.15,
    intensity_jitter: float = 0.0,
    phase: float = 0.0,
    seed: int = 0,
) -> OccluderSpec:
    """Build a fence of ``slat_count`` slats over ``span`` pixels covering ``r_o``.

    Slat intensities are uniform in ``intensity ± intensity_jitter``.
    """

    if not 0.0 <= r_o < 1.0:
        raise InvalidArgumentError(f"r_o must lie in [0, 1), got {r_o}")
    if slat_count < 1:
        raise InvalidArgumentError(f"slat_count must be positive, got {slat_count}")
    if span <= 0:
        raise InvalidArgumentError(f"span must be positive, got {span}")
    if r_o == 0.0:
        return OccluderSpec.empty(orientation)
    period = span / slat_count
    slat, gap = r_o * period, (1.0 - r_o) * period
    if intensity_jitter > 0.0:
        rng = np.random.default_rng(seed)
        levels = rng.uniform(intensity - intensity_jitter, intensity + intensity_jitter, slat_count)
        levels = np.clip(levels, INTENSITY_FLOOR, 1.0)
    else:
        levels = np.full(1, intensity)
    segments: list[OccluderSegment] = []
    for level in levels:
        segments.append(OccluderSegment(slat, float(level)))
        segments.append(OccluderSegment(gap))
    return OccluderSpec(kind="fence", orientation=orientation, segments=tuple(segments), phase=phase)


def make_cardboard_occluder(
    slits: Sequence[tuple[float, float]],
    *,
    span: float = 346.0,
    intensity: float = 0.1,
    orientation: str = "vertical",
) -> OccluderSpec:
    """Uniform board of width ``span`` with open ``(start, width)`` slits."""

    ordered = sorted((float(start), float(width)) for start, width in slits)
    segments: list[OccluderSegment] = []
    cursor = 0.0
    for start, width in ordered:
        if start < cursor or width <= 0 or start + width > span:
            raise InvalidArgumentError(f"invalid or overlapping slit ({start}, {width})")
        segments.append(OccluderSegment(start - cursor, intensity))
        segments.append(OccluderSegment(width))
        cursor = start + width
    segments.append(OccluderSegment(span - cursor, intensity))
    if not any(not segment.occluded for segment in segments):
        raise InvalidArgumentError("a cardboard occluder needs at least one slit")
    return OccluderSpec(kind="cardboard", orientation=orientation, segments=tuple(segments))


def make_stripe_occluder(
    r_o: float,
    slat_count: int,
    stripes: int,
    orientation: str = "vertical",
    *,
    span: float = 346.0,
    dark: float = 0.05,
    bright: float = 0.6,
) -> OccluderSpec:
    """Fence whose slats carry ``stripes`` alternating dark/bright bands.

    Each slat adds ``stripes - 1`` occluder-internal edges to its two slit
    edges, so ``r_t = (stripes - 1) / 2``.
    """

    if stripes < 1:
        raise InvalidArgumentError(f"stripes must be positive, got {stripes}")
    base = make_fence_occluder(r_o, slat_count, orientation, span=span, intensity=dark)
    if base.is_empty:
        return base
    slat, gap = base.segments[0].width, base.segments[1].width
    band = slat / stripes
    segments = [
        OccluderSegment(band, dark if index % 2 == 0 else bright) for index in range(stripes)
    ]
    segments.append(OccluderSegment(gap))
    return OccluderSpec(
        kind="stripes",
        orientation=orientation,
        segments=tuple(segments),
        r_t=(stripes - 1) / 2.0,
    )


def make_texture(
    kind: str,
    shape: tuple[int, int],
    *,
    mean: float = 0.5,
    contrast: float = 0.6,
    scale: float = 6.0,
    seed: int = 0,
) -> GrayImage:
    """Procedural target texture with values in ``mean ± contrast / 2``."""

    if kind not in TEXTURE_KINDS:
        raise InvalidArgumentError(f"unknown texture kind {kind!r}; expected one of {TEXTURE_KINDS}")
    if scale <= 0:
        raise InvalidArgumentError(f"texture scale must be positive, got {scale}")
    height, width = shape
    rows, cols = np.mgrid[0:height, 0:width].astype(np.float64)
    if kind == "constant":
        pattern = np.zeros(shape)
    elif kind == "gradient":
        pattern = 2.0 * cols / max(width - 1, 1) - 1.0
    elif kind == "checker":
        cells = np.floor(rows / scale) + np.floor(cols / scale)
        pattern = np.where(cells % 2 == 0, 1.0, -1.0)
    elif kind == "bars":
        pattern = np.where(np.floor(cols / scale) % 2 == 0, 1.0, -1.0)
    else:
        rng = np.random.default_rng(seed)
        noise = ndimage.gaussian_filter(rng.standard_normal(shape), sigma=scale, mode="wrap")
        peak = np.max(np.abs(noise))
        pattern = noise / peak if peak > 0 else noise
    values = np.clip(mean + 0.5 * contrast * pattern, INTENSITY_FLOOR, 1.0)
    return GrayImage(values, (0.0, 1.0))


def texture_shape_for(
    resolution: tuple[int, int],
    trajectory: Trajectory,
    fx: float,
    fy: float,
    depth: float,
) -> tuple[int, int]:
    """Texture size that keeps every view of ``trajectory`` inside the texture."""

    height, width = resolution
    start, end = trajectory.t_span
    reach = max(abs(start - trajectory.t_ref), abs(end - trajectory.t_ref)) / US_PER_SECOND
    margin_x = math.ceil(abs(fx * trajectory.v[0] / depth) * reach) + 2
    margin_y = math.ceil(abs(fy * trajectory.v[1] / depth) * reach) + 2
    return height + 2 * margin_y, width + 2 * margin_x


def _to_unit(image: GrayImage) -> np.ndarray:
    low, high = image.range_hint
    if high <= low:
        raise InvalidArgumentError(f"invalid texture range {image.range_hint}")
    return np.clip((image.data - low) / (high - low), 0.0, 1.0)


__all__ = [
    "DEFAULT_ETA",
    "DEFAULT_SAMPLE_RATE",
    "INTENSITY_FLOOR",
    "OccluderSegment",
    "OccluderSpec",
    "SceneSpec",
    "TEXTURE_KINDS",
    "Trajectory",
    "make_cardboard_occluder",
    "make_fence_occluder",
    "make_stripe_occluder",
    "make_texture",
    "render_coverage",
    "render_view",
    "texture_shape_for",
]
