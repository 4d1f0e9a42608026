"""Formatting helpers for command-line summaries and report files."""

from __future__ import annotations

import math
from typing import Optional


def format_metric(value: Optional[float], digits: int = 4) -> str:
    """Render a metric value; missing or NaN values become ``-``."""

    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    return f"{value:.{digits}f}"


def format_psi(psi: tuple[float, float]) -> str:
    return f"({psi[0]:.3f}, {psi[1]:.3f}) px/s"


def format_duration(seconds: Optional[float]) -> str:
    """Return an elapsed time such as ``1m 05s``."""

    if seconds is None or seconds < 0:
        return "-"
    whole = int(seconds)
    hours, remainder = divmod(whole, 3600)
    minutes, seconds_left = divmod(remainder, 60)
    if hours:
        return f"{hours:d}h {minutes:02d}m {seconds_left:02d}s"
    if minutes:
        return f"{minutes:d}m {seconds_left:02d}s"
    return f"{seconds:.1f}s"


def humanize_status(status: Optional[str]) -> str:
    if not status:
        return "Unknown"
    return status.replace("_", " ").title()


__all__ = ["format_duration", "format_metric", "format_psi", "humanize_status"]
