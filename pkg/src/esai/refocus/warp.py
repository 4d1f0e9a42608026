"""Event warping onto a reference viewpoint.

Under uniform fronto-parallel motion an event at pixel ``x`` and time ``t``
maps to ``x + psi * (t - t_ref)`` with ``psi = f * v / d`` in pixels per
second. The general form applies the plane-induced homography of each event's
camera pose.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from esai.common.errors import InvalidArgumentError, PoseLookupError
from esai.events.types import US_PER_SECOND, EventStream, SubpixelEventStream

LOGGER = logging.getLogger(__name__)

ORTHONORMAL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class WarpParam:
    """Warping parameter ``psi`` (px/s per axis) about reference time ``t_ref`` (µs)."""

    psi: tuple[float, float]
    t_ref: int = 0

    def __post_init__(self) -> None:
        psi = (float(self.psi[0]), float(self.psi[1]))
        if not all(math.isfinite(component) for component in psi):
            raise InvalidArgumentError(f"psi must be finite, got {psi}")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "t_ref", int(self.t_ref))

    def __add__(self, other: "WarpParam") -> "WarpParam":
        if other.t_ref != self.t_ref:
            raise InvalidArgumentError("warp parameters with different t_ref cannot be added")
        return WarpParam((self.psi[0] + other.psi[0], self.psi[1] + other.psi[1]), self.t_ref)

    def __neg__(self) -> "WarpParam":
        return WarpParam((-self.psi[0], -self.psi[1]), self.t_ref)


@dataclass(frozen=True, eq=False)
class CameraPose:
    """Rotation ``R``, translation ``T`` (m) and intrinsics ``K`` of one viewpoint."""

    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    T: np.ndarray = field(default_factory=lambda: np.zeros(3))
    K: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self) -> None:
        rotation = np.asarray(self.R, dtype=np.float64)
        translation = np.asarray(self.T, dtype=np.float64).reshape(-1)
        intrinsics = np.asarray(self.K, dtype=np.float64)
        if rotation.shape != (3, 3) or intrinsics.shape != (3, 3) or translation.shape != (3,):
            raise InvalidArgumentError("pose needs 3x3 R and K and a 3-vector T")
        if not np.allclose(rotation @ rotation.T, np.eye(3), atol=ORTHONORMAL_TOLERANCE) or not (
            abs(np.linalg.det(rotation) - 1.0) <= ORTHONORMAL_TOLERANCE
        ):
            raise InvalidArgumentError("R must be a proper rotation (orthonormal, det 1)")
        object.__setattr__(self, "R", rotation)
        object.__setattr__(self, "T", translation)
        object.__setattr__(self, "K", intrinsics)


PoseLookup = Callable[[int], CameraPose]


def compute_psi(
    f: tuple[float, float], v: tuple[float, float], d: float, t_ref: int = 0
) -> WarpParam:
    """``psi = (f_x v_x / d, f_y v_y / d)``."""

    if not d > 0:
        raise InvalidArgumentError(f"depth must be positive, got {d}")
    return WarpParam((f[0] * v[0] / d, f[1] * v[1] / d), t_ref)


def intrinsics_matrix(fx: float, fy: float, cx: float = 0.0, cy: float = 0.0) -> np.ndarray:
    return np.array([[fx, 0.0, cx], [0.0, fy, cy], [0.0, 0.0, 1.0]])


def warp_events(
    stream: EventStream | SubpixelEventStream, warp: WarpParam
) -> SubpixelEventStream:
    """Shift each event by ``psi * (t - t_ref)``; coordinates are not clipped."""

    seconds = (stream.t - warp.t_ref) / US_PER_SECOND
    x = stream.x + warp.psi[0] * seconds
    y = stream.y + warp.psi[1] * seconds
    return SubpixelEventStream(stream.t, x, y, stream.p, stream.resolution, stream.t_span)


def warp_events_general(
    stream: EventStream, pose_of: PoseLookup, d: float
) -> SubpixelEventStream:
    """Map events through ``K R K^-1 x + K T / d`` of the pose at each timestamp."""

    if not d > 0:
        raise InvalidArgumentError(f"depth must be positive, got {d}")
    timestamps, inverse = np.unique(stream.t, return_inverse=True)
    homographies = np.empty((timestamps.size, 3, 3))
    offsets = np.empty((timestamps.size, 3))
    for index, timestamp in enumerate(timestamps):
        pose = _lookup(pose_of, int(timestamp))
        homographies[index] = pose.K @ pose.R @ np.linalg.inv(pose.K)
        offsets[index] = pose.K @ pose.T / d
    points = np.stack((stream.x, stream.y, np.ones(len(stream)))).T.astype(np.float64)
    mapped = np.einsum("nij,nj->ni", homographies[inverse], points) + offsets[inverse]
    x = mapped[:, 0] / mapped[:, 2]
    y = mapped[:, 1] / mapped[:, 2]
    return SubpixelEventStream(stream.t, x, y, stream.p, stream.resolution, stream.t_span)


def _lookup(pose_of: PoseLookup, timestamp: int) -> CameraPose:
    try:
        pose = pose_of(timestamp)
    except (KeyError, IndexError, LookupError) as exc:
        raise PoseLookupError(f"no camera pose for t={timestamp} us") from exc
    if pose is None:
        raise PoseLookupError(f"no camera pose for t={timestamp} us")
    if abs(pose.T[2]) > 0.0:
        raise InvalidArgumentError(
            f"pose at t={timestamp} us translates along the optical axis; "
            "only fronto-parallel motion is supported"
        )
    return pose


def uniform_motion_poses(
    v: tuple[float, float], K: np.ndarray, t_ref: int
) -> PoseLookup:
    """Pose lookup for straight uniform motion with velocity ``v`` (m/s)."""

    def pose_of(t_us: int) -> CameraPose:
        seconds = (t_us - t_ref) / US_PER_SECOND
        return CameraPose(T=np.array([v[0] * seconds, v[1] * seconds, 0.0]), K=K)

    return pose_of


__all__ = [
    "CameraPose",
    "PoseLookup",
    "WarpParam",
    "compute_psi",
    "intrinsics_matrix",
    "uniform_motion_poses",
    "warp_events",
    "warp_events_general",
]
