"""Accumulation baseline: polarity-blind counts of refocused events, min-max scaled."""

from __future__ import annotations

from esai.events.stacking import normalize_minmax
from esai.events.types import EventStream, GrayImage, Resolution, SubpixelEventStream
from esai.refocus.accumulate import accumulate


def reconstruct_acc(
    refocused: SubpixelEventStream | EventStream, resolution: Resolution | None = None
) -> GrayImage:
    return normalize_minmax(accumulate(refocused, resolution, voting="nearest"))


__all__ = ["reconstruct_acc"]
