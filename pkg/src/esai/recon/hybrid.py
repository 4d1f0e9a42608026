"""Inference with the trained hybrid spiking/convolutional network."""

from __future__ import annotations

import logging

import numpy as np
import torch

from esai.common.errors import InvalidArgumentError
from esai.events.stacking import stack_events
from esai.events.types import EventStream, GrayImage
from esai.recon.decoder import DecoderParams, decoder_forward, decoder_input
from esai.refocus.warp import WarpParam, warp_events
from esai.snn.encoder import EncoderParams, encode

LOGGER = logging.getLogger(__name__)


def reconstruct_hybrid(
    stream: EventStream,
    warp: WarpParam,
    encoder: EncoderParams,
    decoder: DecoderParams,
    *,
    intervals_used: int | None = None,
) -> GrayImage:
    """Refocus, stack into ``encoder.intervals`` slices and decode.

    ``intervals_used`` keeps only the first ``k`` slices of the stack.
    """

    intervals = encoder.intervals
    used = intervals if intervals_used is None else intervals_used
    if not 1 <= used <= intervals:
        raise InvalidArgumentError(f"intervals_used must lie in 1..{intervals}, got {used}")
    start, end = stream.t_span
    if end <= start:
        raise InvalidArgumentError("event window is empty; cannot build a frame stack")
    refocused = warp_events(stream, warp)
    stack = stack_events(refocused, intervals, (start, end))
    frames = torch.as_tensor(stack.data[np.newaxis, :used], dtype=encoder.dtype)
    with torch.no_grad():
        trace = encode(frames, encoder)
        image = decoder_forward(decoder_input(trace.features, trace.layer1_rate, frames), decoder)
    LOGGER.debug("Hybrid reconstruction from %d events using %d/%d intervals", len(stream), used, intervals)
    return GrayImage(image[0, 0].double().numpy(), (0.0, 1.0))


__all__ = ["reconstruct_hybrid"]
