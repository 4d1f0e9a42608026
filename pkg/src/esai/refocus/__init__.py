"""Event refocusing, accumulation imaging, E-EPI slicing and APSE."""

from .accumulate import FOCUS_METRICS, VOTING_MODES, accumulate, accumulate_coordinates, focus_score
from .autofocus import SearchParams, auto_refocus
from .epi import EpiImage, epi_slice, epi_verticality, write_epi
from .metrics import apse
from .warp import (
    CameraPose,
    WarpParam,
    compute_psi,
    intrinsics_matrix,
    uniform_motion_poses,
    warp_events,
    warp_events_general,
)

__all__ = [
    "CameraPose",
    "EpiImage",
    "FOCUS_METRICS",
    "SearchParams",
    "VOTING_MODES",
    "WarpParam",
    "accumulate",
    "accumulate_coordinates",
    "apse",
    "auto_refocus",
    "compute_psi",
    "epi_slice",
    "epi_verticality",
    "focus_score",
    "intrinsics_matrix",
    "uniform_motion_poses",
    "warp_events",
    "warp_events_general",
    "write_epi",
]
