"""Warping-parameter search by maximising event alignment."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from esai.common.errors import InvalidArgumentError
from esai.events.types import US_PER_SECOND, EventStream
from esai.refocus.accumulate import (
    DEFAULT_TAU,
    FOCUS_METRICS,
    VOTING_MODES,
    accumulate_coordinates,
    focus_score,
)
from esai.refocus.warp import WarpParam

LOGGER = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12
# Neighbouring grid points may disagree by at most this many pixels at the window edge.
GRID_SHIFT_PX = 0.5
MAX_GRID_POINTS = 1001
MAX_GRID_POINTS_2D = 81
REFINE_CANDIDATES = 3


@dataclass(frozen=True)
class SearchParams:
    """Search bounds (px/s) and settings; ``psi_bounds_y=None`` keeps ψ_y at zero.

    ``grid_points`` is a lower bound: the grid is made finer when the window is
    long enough for one grid step to shift events by more than half a pixel.
    """

    psi_bounds_x: tuple[float, float] = (-200.0, 200.0)
    psi_bounds_y: tuple[float, float] | None = None
    grid_points: int = 41
    refine_iters: int = 30
    metric: str = "variance"
    voting: str = "nearest"
    tau: float = DEFAULT_TAU

    def __post_init__(self) -> None:
        for bounds in (self.psi_bounds_x, self.psi_bounds_y):
            if bounds is None:
                continue
            low, high = bounds
            if not (math.isfinite(low) and math.isfinite(high)) or low >= high:
                raise InvalidArgumentError(f"psi bounds must be finite with lower < upper, got {bounds}")
        if self.grid_points < 2:
            raise InvalidArgumentError(f"grid_points must be at least 2, got {self.grid_points}")
        if self.refine_iters < 0:
            raise InvalidArgumentError(f"refine_iters must be non-negative, got {self.refine_iters}")
        if self.metric not in FOCUS_METRICS:
            raise InvalidArgumentError(f"metric must be one of {FOCUS_METRICS}, got {self.metric!r}")
        if self.voting not in VOTING_MODES:
            raise InvalidArgumentError(f"voting must be one of {VOTING_MODES}, got {self.voting!r}")


class _Objective:
    def __init__(self, stream: EventStream, t_ref: int, search: SearchParams) -> None:
        self._x = stream.x.astype(np.float64)
        self._y = stream.y.astype(np.float64)
        self._seconds = (stream.t - t_ref) / US_PER_SECOND
        self._resolution = stream.resolution
        self._search = search
        self.evaluations = 0

    def __call__(self, psi_x: float, psi_y: float) -> float:
        self.evaluations += 1
        counts = accumulate_coordinates(
            self._x + psi_x * self._seconds,
            self._y + psi_y * self._seconds,
            self._resolution,
            self._search.voting,
        )
        return focus_score(counts, self._search.metric, self._search.tau)


def grid_size(bounds: tuple[float, float], half_window_s: float, minimum: int, cap: int) -> int:
    """Grid points over ``bounds`` so one step moves edge events by at most half a pixel."""

    if half_window_s <= 0:
        return minimum
    needed = math.ceil((bounds[1] - bounds[0]) * half_window_s / GRID_SHIFT_PX) + 1
    return int(min(max(minimum, needed), max(cap, minimum)))


def auto_refocus(stream: EventStream, search: SearchParams | None = None) -> WarpParam:
    """Grid search over ψ followed by joint bounded refinement of the best local maxima.

    ``t_ref`` is the midpoint of the stream's time span. Ties are broken
    toward the smaller ``|ψ|``.
    """

    search = search or SearchParams()
    if len(stream) == 0:
        raise InvalidArgumentError("cannot refocus an empty event stream")
    start, end = stream.t_span
    t_ref = (start + end) // 2
    objective = _Objective(stream, t_ref, search)

    half_window = (end - start) / 2.0 / US_PER_SECOND
    two_axes = search.psi_bounds_y is not None
    cap = MAX_GRID_POINTS_2D if two_axes else MAX_GRID_POINTS
    grid_x = np.linspace(
        *search.psi_bounds_x, grid_size(search.psi_bounds_x, half_window, search.grid_points, cap)
    )
    grid_y = (
        np.linspace(
            *search.psi_bounds_y,
            grid_size(search.psi_bounds_y, half_window, search.grid_points, cap),
        )
        if two_axes
        else np.zeros(1)
    )
    scores = np.array([[objective(px, py) for px in grid_x] for py in grid_y])
    candidates = _local_maxima(scores, grid_x, grid_y)
    psi, best_score = candidates[0]
    LOGGER.debug(
        "Grid of %dx%d: optimum psi=(%.3f, %.3f) score=%.6g",
        grid_x.size,
        grid_y.size,
        psi[0],
        psi[1],
        best_score,
    )

    if search.refine_iters > 0:
        steps = (
            float(grid_x[1] - grid_x[0]),
            float(grid_y[1] - grid_y[0]) if two_axes else 0.0,
        )
        for candidate, score in candidates:
            refined = _refine(objective, candidate, steps, search)
            refined_score = objective(*refined)
            if refined_score < score:
                refined, refined_score = candidate, score
            if _better(refined, refined_score, psi, best_score):
                psi, best_score = refined, refined_score

    LOGGER.info(
        "Auto-refocus psi=(%.3f, %.3f) px/s score=%.6g after %d evaluations",
        psi[0],
        psi[1],
        best_score,
        objective.evaluations,
    )
    return WarpParam((psi[0], psi[1]), t_ref)


def _better(
    psi: tuple[float, float], score: float, best: tuple[float, float], best_score: float
) -> bool:
    margin = TIE_TOLERANCE * abs(best_score)
    if score > best_score + margin:
        return True
    return score >= best_score - margin and math.hypot(*psi) < math.hypot(*best)


def _local_maxima(
    scores: np.ndarray, grid_x: np.ndarray, grid_y: np.ndarray
) -> list[tuple[tuple[float, float], float]]:
    """Best grid cells that are local maxima, best first, smaller ``|ψ|`` first on ties."""

    padded = np.pad(scores, 1, mode="constant", constant_values=-np.inf)
    rows, columns = scores.shape
    neighbours = np.stack(
        [
            padded[1 + dr : 1 + dr + rows, 1 + dc : 1 + dc + columns]
            for dr in (-1, 0, 1)
            for dc in (-1, 0, 1)
            if dr or dc
        ]
    )
    peaks = np.argwhere(scores >= neighbours.max(axis=0))
    ranked = sorted(
        (
            (-float(scores[row, column]), math.hypot(grid_x[column], grid_y[row]), int(row), int(column))
            for row, column in peaks
        )
    )
    best_score = -ranked[0][0]
    ties = [entry for entry in ranked if -entry[0] >= best_score - TIE_TOLERANCE * abs(best_score)]
    ordered = sorted(ties, key=lambda entry: entry[1]) + [entry for entry in ranked if entry not in ties]
    return [
        ((float(grid_x[column]), float(grid_y[row])), -negative)
        for negative, _, row, column in ordered[:REFINE_CANDIDATES]
    ]


def _refine(
    objective: _Objective,
    start: tuple[float, float],
    steps: tuple[float, float],
    search: SearchParams,
) -> tuple[float, float]:
    low_x = max(search.psi_bounds_x[0], start[0] - steps[0])
    high_x = min(search.psi_bounds_x[1], start[0] + steps[0])
    if search.psi_bounds_y is None:
        result = optimize.minimize_scalar(
            lambda value: -objective(value, 0.0),
            bounds=(low_x, high_x),
            method="bounded",
            options={"maxiter": search.refine_iters, "xatol": 1e-3},
        )
        return float(result.x), 0.0

    low_y = max(search.psi_bounds_y[0], start[1] - steps[1])
    high_y = min(search.psi_bounds_y[1], start[1] + steps[1])
    # Simplex spans one grid step along each axis, pointing into the local box.
    dx = steps[0] if start[0] + steps[0] <= high_x else -steps[0]
    dy = steps[1] if start[1] + steps[1] <= high_y else -steps[1]
    simplex = np.array([start, (start[0] + dx, start[1]), (start[0], start[1] + dy)])
    result = optimize.minimize(
        lambda point: -objective(float(point[0]), float(point[1])),
        np.asarray(start, dtype=np.float64),
        method="Nelder-Mead",
        bounds=[(low_x, high_x), (low_y, high_y)],
        options={
            "initial_simplex": simplex,
            "maxiter": 4 * search.refine_iters,
            "xatol": 1e-3,
            "fatol": 0.0,
        },
    )
    return float(result.x[0]), float(result.x[1])


__all__ = ["SearchParams", "auto_refocus", "grid_size"]
