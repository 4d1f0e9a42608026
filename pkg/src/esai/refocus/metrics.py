"""Average pixel shift error of an estimated warping parameter."""

from __future__ import annotations

import math

import numpy as np

from esai.common.errors import InvalidArgumentError
from esai.events.types import US_PER_SECOND, EventStream
from esai.refocus.warp import WarpParam


def apse(psi_est: WarpParam, psi_gt: WarpParam, stream: EventStream) -> float:
    """Mean over all events of ``|psi_est - psi_gt| * |t - t_ref|`` in pixels.

    ``t_ref`` is taken from the ground truth.
    """

    if len(stream) == 0:
        raise InvalidArgumentError("APSE needs a non-empty event stream")
    error = math.hypot(psi_est.psi[0] - psi_gt.psi[0], psi_est.psi[1] - psi_gt.psi[1])
    seconds = np.abs(stream.t - psi_gt.t_ref) / US_PER_SECOND
    return float(error * np.mean(seconds))


__all__ = ["apse"]
