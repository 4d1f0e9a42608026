"""Spiking encoder: LIF dynamics, forward rates and surrogate-gradient backward."""

from .encoder import (
    DEFAULT_INTERVALS,
    FEATURE_CHANNELS,
    KERNEL_SHAPES,
    LAYER1_CHANNELS,
    EncoderParams,
    EncoderTrace,
    encode,
    snn_backward,
    snn_forward,
)
from .lif import LifConfig, LifLayerState, SpikeFunction, lif_step, relaxed_spike, surrogate_grad

__all__ = [
    "DEFAULT_INTERVALS",
    "EncoderParams",
    "EncoderTrace",
    "FEATURE_CHANNELS",
    "KERNEL_SHAPES",
    "LAYER1_CHANNELS",
    "LifConfig",
    "LifLayerState",
    "SpikeFunction",
    "encode",
    "lif_step",
    "relaxed_spike",
    "snn_backward",
    "snn_forward",
    "surrogate_grad",
]
