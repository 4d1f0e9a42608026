"""Idealised DVS emulation over a rendered camera sweep.

Each pixel keeps the log intensity of its last event as a reference level and
fires one event per ``eta`` step the (linearly interpolated) signal moves away
from it. Events carry the occlusion state of the pixel footprint at the
previous and current event so they can be split into target, occluder and
mixed categories.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np

from esai.common.errors import InvalidArgumentError, SimulationError
from esai.events.dataset import frame_to_unit, save_sample
from esai.events.types import (
    US_PER_SECOND,
    DatasetSample,
    EventCategory,
    EventStream,
    GrayImage,
    LabeledEventStream,
    TimedFrame,
)
from esai.simulation.scene import INTENSITY_FLOOR, SceneSpec, Trajectory, render_coverage

LOGGER = logging.getLogger(__name__)

APS_RATE_HZ = 30.0
MAX_STEP_IN_ETA = 4.0
CROSSING_TOLERANCE = 1e-9
COVERAGE_TOLERANCE = 1e-9
DENSITY_THRESHOLD = 8.0 / 255.0

_CLEAR, _COVERED, _PARTIAL = 0, 1, 2


def simulate_events(
    scene: SceneSpec, trajectory: Trajectory, seed: int = 0
) -> tuple[LabeledEventStream, DatasetSample]:
    """Simulate the labeled event stream and the dataset sample of one sweep."""

    if trajectory.duration <= 0:
        raise InvalidArgumentError("trajectory duration must be positive")
    start, end = trajectory.t_span
    height, width = scene.resolution
    steps = max(1, math.ceil(trajectory.duration * trajectory.sample_rate / US_PER_SECOND))
    times = np.linspace(start, end, steps + 1)
    eta = scene.eta

    log_prev, coverage_prev = _sample(scene, trajectory, times[0])
    reference = log_prev.copy()
    reference_state = _state(coverage_prev)
    chunks: list[tuple[np.ndarray, ...]] = []

    for step in range(1, steps + 1):
        log_cur, coverage_cur = _sample(scene, trajectory, times[step])
        change = np.abs(log_cur - log_prev)
        worst = int(np.argmax(change))
        if change.flat[worst] >= MAX_STEP_IN_ETA * eta:
            row, column = divmod(worst, width)
            raise SimulationError(
                f"sampling too coarse: log-intensity step {change.flat[worst]:.4f} >= "
                f"{MAX_STEP_IN_ETA:g} eta at pixel (x={column}, y={row}) near t={times[step]:.0f} us; "
                f"raise sample_rate above {trajectory.sample_rate:g}"
            )
        offset = log_cur - reference
        counts = np.floor(np.abs(offset) / eta + CROSSING_TOLERANCE).astype(np.int64).ravel()
        pixels = np.flatnonzero(counts)
        if pixels.size:
            chunk = _crossings(
                pixels,
                counts[pixels],
                np.sign(offset.ravel()[pixels]),
                reference.ravel(),
                reference_state.ravel(),
                log_prev.ravel()[pixels],
                log_cur.ravel()[pixels],
                coverage_prev.ravel()[pixels],
                coverage_cur.ravel()[pixels],
                (times[step - 1], times[step]),
                eta,
            )
            chunks.append(chunk)
        log_prev, coverage_prev = log_cur, coverage_cur

    if chunks:
        columns = [np.concatenate(parts) for parts in zip(*chunks)]
    else:
        columns = [np.zeros(0, dtype=np.int64) for _ in range(4)]
    t, pixel, polarity, labels = columns[0], columns[1], columns[2], columns[3]

    rng = np.random.default_rng(seed)
    noise = _noise(rng, scene, trajectory)
    t = np.concatenate((t, noise[0]))
    pixel = np.concatenate((pixel, noise[1]))
    polarity = np.concatenate((polarity, noise[2]))
    labels = np.concatenate((labels, np.full(noise[0].size, int(EventCategory.NOISE))))

    y, x = np.divmod(pixel, width)
    order = np.lexsort((polarity, x, y, t))
    stream = EventStream(
        t[order], x[order], y[order], polarity[order], (width, height), (start, end)
    )
    labeled = LabeledEventStream(stream, labels[order])
    LOGGER.info(
        "Simulated %d events over %d steps (AA=%d OO=%d OA=%d noise=%d)",
        len(stream),
        steps,
        labeled.count(EventCategory.AA),
        labeled.count(EventCategory.OO),
        labeled.count(EventCategory.OA),
        labeled.count(EventCategory.NOISE),
    )
    return labeled, _build_sample(scene, trajectory, stream)


def measure_occlusion_density(
    occluded: GrayImage, occlusion_free: GrayImage, threshold: float = DENSITY_THRESHOLD
) -> float:
    """Fraction of pixels whose occluded value departs from the clear view by ``threshold``."""

    if occluded.shape != occlusion_free.shape:
        raise InvalidArgumentError(
            f"frame shapes differ: {occluded.shape} vs {occlusion_free.shape}"
        )
    difference = np.abs(frame_to_unit(occluded) - frame_to_unit(occlusion_free))
    return float(np.mean(difference > threshold))


def export_sample(sample: DatasetSample, directory: Path | str) -> None:
    """Write a simulated sample in the dataset directory layout."""

    save_sample(sample, directory)


def _sample(scene: SceneSpec, trajectory: Trajectory, t_us: float) -> tuple[np.ndarray, np.ndarray]:
    cam_x, cam_y = trajectory.position(t_us)
    intensity, coverage = render_coverage(scene, float(cam_x), float(cam_y))
    return np.log(np.maximum(intensity, INTENSITY_FLOOR)), coverage


def _state(coverage: np.ndarray) -> np.ndarray:
    state = np.full(coverage.shape, _PARTIAL, dtype=np.int8)
    state[coverage <= COVERAGE_TOLERANCE] = _CLEAR
    state[coverage >= 1.0 - COVERAGE_TOLERANCE] = _COVERED
    return state


def _crossings(
    pixels: np.ndarray,
    counts: np.ndarray,
    signs: np.ndarray,
    reference: np.ndarray,
    reference_state: np.ndarray,
    log_prev: np.ndarray,
    log_cur: np.ndarray,
    coverage_prev: np.ndarray,
    coverage_cur: np.ndarray,
    window: tuple[float, float],
    eta: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Emit the level crossings of one sampling step; updates reference arrays in place."""

    total = int(counts.sum())
    group = np.repeat(np.arange(pixels.size), counts)
    first = np.cumsum(counts) - counts
    level_index = np.arange(total) - np.repeat(first, counts) + 1
    levels = reference[pixels][group] + level_index * eta * signs[group]

    slope = (log_cur - log_prev)[group]
    fraction = np.clip((levels - log_prev[group]) / slope, 0.0, 1.0)
    t0, t1 = window
    timestamps = np.rint(t0 + fraction * (t1 - t0)).astype(np.int64)

    coverage = coverage_prev[group] + fraction * (coverage_cur - coverage_prev)[group]
    states = _state(coverage)
    previous = np.empty_like(states)
    previous[1:] = states[:-1]
    previous[first] = reference_state[pixels]
    labels = np.full(total, int(EventCategory.OA), dtype=np.int64)
    labels[(previous == _CLEAR) & (states == _CLEAR)] = int(EventCategory.AA)
    labels[(previous == _COVERED) & (states == _COVERED)] = int(EventCategory.OO)

    last = first + counts - 1
    reference[pixels] = reference[pixels] + counts * eta * signs
    reference_state[pixels] = states[last]
    polarity = signs[group].astype(np.int64)
    return timestamps, pixels[group].astype(np.int64), polarity, labels


def _noise(
    rng: np.random.Generator, scene: SceneSpec, trajectory: Trajectory
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    height, width = scene.resolution
    expected = scene.noise_rate * trajectory.duration / US_PER_SECOND
    if expected <= 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    counts = rng.poisson(expected, size=height * width)
    pixels = np.repeat(np.arange(height * width, dtype=np.int64), counts)
    start, end = trajectory.t_span
    timestamps = rng.integers(start, end, size=pixels.size, endpoint=True)
    polarity = rng.choice(np.array([-1, 1], dtype=np.int64), size=pixels.size)
    LOGGER.debug("Injected %d noise events (rate %.3g /px/s)", pixels.size, scene.noise_rate)
    return timestamps.astype(np.int64), pixels, polarity


def _quantized(intensity: np.ndarray) -> GrayImage:
    return GrayImage(np.clip(np.rint(intensity * 255.0), 0.0, 255.0), (0.0, 255.0))


def _build_sample(scene: SceneSpec, trajectory: Trajectory, stream: EventStream) -> DatasetSample:
    start, end = trajectory.t_span
    period = US_PER_SECOND / APS_RATE_HZ
    frame_times = np.arange(start, end + 1, period)
    frames = []
    for t_frame in frame_times:
        cam_x, cam_y = trajectory.position(t_frame)
        intensity, _ = render_coverage(scene, float(cam_x), float(cam_y))
        frames.append(TimedFrame(_quantized(intensity), int(round(t_frame)) - start))

    clear = scene.without_occluder()
    free_intensity, _ = render_coverage(clear, 0.0, 0.0)
    occluded_intensity, _ = render_coverage(scene, 0.0, 0.0)
    free_image = _quantized(free_intensity)
    measured = measure_occlusion_density(_quantized(occluded_intensity), free_image)

    extra = {
        "t_ref": str(trajectory.t_ref - start),
        "fy": repr(float(scene.fy)),
        "v_y": repr(float(trajectory.v[1])),
        "occluder_depth": repr(float(scene.occluder_depth)),
        "eta": repr(float(scene.eta)),
        "noise_rate": repr(float(scene.noise_rate)),
        "occluder": scene.occluder.kind,
        "r_o": repr(scene.occluder.r_o),
        "r_t": repr(scene.occluder.r_t),
        "r_o_measured": repr(measured),
    }
    return DatasetSample(
        v=trajectory.v[0],
        fx=scene.fx,
        size=scene.resolution,
        depth=scene.depth,
        events=stream.shifted(start),
        occ_aps=tuple(frames),
        occ_free_aps=TimedFrame(free_image, trajectory.t_ref - start),
        t_offset=start,
        extra=extra,
    )


__all__ = ["export_sample", "measure_occlusion_density", "simulate_events"]
