"""Three-layer spiking convolutional encoder.

Layer 1 (1x1, 2 -> 8) receives the event-count frame of each interval as input
current, layer 2 (3x3, 8 -> 16) the spikes of layer 1 and layer 3
(7x7, 16 + 8 -> 32) the spikes of layer 2 concatenated with the layer-1 skip.
All layers see step ``t`` inputs at step ``t``. Output features are the mean
layer-3 spike rate over the intervals.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import torch
import torch.nn.functional as F

from esai.common.errors import InvalidArgumentError
from esai.events.types import FrameStack
from esai.snn.lif import LifConfig, LifLayerState, lif_step

LOGGER = logging.getLogger(__name__)

LAYER1_CHANNELS = 8
LAYER2_CHANNELS = 16
FEATURE_CHANNELS = 32
INPUT_CHANNELS = 2
KERNEL_SHAPES = (
    (LAYER1_CHANNELS, INPUT_CHANNELS, 1, 1),
    (LAYER2_CHANNELS, LAYER1_CHANNELS, 3, 3),
    (FEATURE_CHANNELS, LAYER2_CHANNELS + LAYER1_CHANNELS, 7, 7),
)
DEFAULT_INTERVALS = 30


@dataclass
class EncoderParams:
    """Encoder kernels, per-layer neuron constants and the interval count ``N``."""

    weights: list[torch.Tensor]
    lif: tuple[LifConfig, LifConfig, LifConfig] = field(
        default_factory=lambda: (LifConfig(), LifConfig(), LifConfig())
    )
    intervals: int = DEFAULT_INTERVALS

    def __post_init__(self) -> None:
        if len(self.weights) != len(KERNEL_SHAPES):
            raise InvalidArgumentError(f"expected {len(KERNEL_SHAPES)} kernels, got {len(self.weights)}")
        for index, (weight, shape) in enumerate(zip(self.weights, KERNEL_SHAPES), start=1):
            if tuple(weight.shape) != shape:
                raise InvalidArgumentError(
                    f"layer {index} kernel must have shape {shape}, got {tuple(weight.shape)}"
                )
            if not torch.isfinite(weight).all():
                raise InvalidArgumentError(f"layer {index} kernel holds non-finite values")
        if len(self.lif) != len(KERNEL_SHAPES):
            raise InvalidArgumentError("one LifConfig per layer is required")
        if self.intervals < 1:
            raise InvalidArgumentError(f"intervals must be positive, got {self.intervals}")
        self.lif = tuple(self.lif)  # type: ignore[assignment]

    @classmethod
    def init(
        cls,
        seed: int = 0,
        *,
        lif: Sequence[LifConfig] | None = None,
        intervals: int = DEFAULT_INTERVALS,
        dtype: torch.dtype = torch.float32,
        gain: float = 1.0,
    ) -> "EncoderParams":
        """He-normal kernels drawn from a seeded generator."""

        generator = torch.Generator().manual_seed(seed)
        weights = []
        for shape in KERNEL_SHAPES:
            fan_in = shape[1] * shape[2] * shape[3]
            scale = gain * math.sqrt(2.0 / fan_in)
            weights.append(torch.randn(shape, generator=generator, dtype=dtype) * scale)
        configs = tuple(lif) if lif is not None else (LifConfig(), LifConfig(), LifConfig())
        return cls(weights=weights, lif=configs, intervals=intervals)  # type: ignore[arg-type]

    @property
    def dtype(self) -> torch.dtype:
        return self.weights[0].dtype

    def parameters(self) -> list[torch.Tensor]:
        return list(self.weights)

    def requires_grad_(self, flag: bool = True) -> "EncoderParams":
        for weight in self.weights:
            weight.requires_grad_(flag)
        return self

    def detached(self) -> "EncoderParams":
        return EncoderParams(
            [weight.detach().clone() for weight in self.weights], self.lif, self.intervals
        )


@dataclass
class EncoderTrace:
    """Per-step record of one forward pass; ``features`` keeps the autograd graph."""

    features: torch.Tensor
    layer1_rate: torch.Tensor
    spikes: list[tuple[torch.Tensor, torch.Tensor, torch.Tensor]]
    potentials: list[tuple[torch.Tensor, torch.Tensor, torch.Tensor]]
    params: EncoderParams
    relaxed: bool = False


def encode(
    frames: torch.Tensor,
    params: EncoderParams,
    *,
    relaxed: bool = False,
    record: bool = False,
) -> EncoderTrace:
    """Run the encoder over a batch of frame stacks of shape (B, N, 2, H, W)."""

    if frames.ndim != 5 or frames.shape[2] != INPUT_CHANNELS:
        raise InvalidArgumentError(
            f"frames must have shape (B, N, {INPUT_CHANNELS}, H, W), got {tuple(frames.shape)}"
        )
    batch, steps, _, height, width = frames.shape
    if steps < 1:
        raise InvalidArgumentError("frame stacks need at least one interval")
    frames = frames.to(params.dtype)
    w1, w2, w3 = params.weights
    c1, c2, c3 = params.lif
    states = [
        LifLayerState.zeros((batch, channels, height, width), params.dtype)
        for channels in (LAYER1_CHANNELS, LAYER2_CHANNELS, FEATURE_CHANNELS)
    ]
    rate1 = torch.zeros((batch, LAYER1_CHANNELS, height, width), dtype=params.dtype)
    rate3 = torch.zeros((batch, FEATURE_CHANNELS, height, width), dtype=params.dtype)
    spikes: list[tuple[torch.Tensor, torch.Tensor, torch.Tensor]] = []
    potentials: list[tuple[torch.Tensor, torch.Tensor, torch.Tensor]] = []

    for step in range(steps):
        current1 = F.conv2d(frames[:, step], w1)
        states[0], o1 = lif_step(states[0], current1, c1, relaxed=relaxed)
        current2 = F.conv2d(o1, w2, padding=1)
        states[1], o2 = lif_step(states[1], current2, c2, relaxed=relaxed)
        current3 = F.conv2d(torch.cat((o2, o1), dim=1), w3, padding=3)
        states[2], o3 = lif_step(states[2], current3, c3, relaxed=relaxed)
        rate1 = rate1 + o1
        rate3 = rate3 + o3
        if record:
            spikes.append((o1, o2, o3))
            potentials.append((states[0].u, states[1].u, states[2].u))

    return EncoderTrace(
        features=rate3 / steps,
        layer1_rate=rate1 / steps,
        spikes=spikes,
        potentials=potentials,
        params=params,
        relaxed=relaxed,
    )


def snn_forward(
    stack: FrameStack | torch.Tensor,
    params: EncoderParams,
    *,
    relaxed: bool = False,
) -> tuple[torch.Tensor, EncoderTrace]:
    """Encode one frame stack (N, 2, H, W) into features of shape (32, H, W)."""

    data = stack.data if isinstance(stack, FrameStack) else stack
    frames = torch.as_tensor(data, dtype=params.dtype)
    if frames.ndim != 4:
        raise InvalidArgumentError(f"frame stack must have shape (N, 2, H, W), got {tuple(frames.shape)}")
    trace = encode(frames.unsqueeze(0), params, relaxed=relaxed, record=True)
    squeezed = EncoderTrace(
        features=trace.features[0],
        layer1_rate=trace.layer1_rate[0],
        spikes=[tuple(layer[0] for layer in step) for step in trace.spikes],  # type: ignore[misc]
        potentials=[tuple(layer[0] for layer in step) for step in trace.potentials],  # type: ignore[misc]
        params=params,
        relaxed=relaxed,
    )
    return squeezed.features, squeezed


def snn_backward(trace: EncoderTrace, upstream_grad: torch.Tensor) -> list[torch.Tensor]:
    """Gradients of ``<upstream_grad, features>`` w.r.t. the encoder kernels.

    The forward must have run with kernels that require gradients.
    """

    upstream_grad = torch.as_tensor(upstream_grad, dtype=trace.features.dtype)
    if upstream_grad.shape != trace.features.shape:
        raise InvalidArgumentError(
            f"upstream gradient shape {tuple(upstream_grad.shape)} does not match features "
            f"{tuple(trace.features.shape)}"
        )
    weights = trace.params.parameters()
    if trace.features.grad_fn is None:
        if not any(weight.requires_grad for weight in weights):
            raise InvalidArgumentError("trace holds no autograd graph; enable requires_grad on the kernels")
        return [torch.zeros_like(weight) for weight in weights]
    grads = torch.autograd.grad(
        trace.features,
        weights,
        grad_outputs=upstream_grad,
        retain_graph=True,
        allow_unused=True,
    )
    return [
        torch.zeros_like(weight) if grad is None else grad
        for weight, grad in zip(weights, grads)
    ]


__all__ = [
    "DEFAULT_INTERVALS",
    "EncoderParams",
    "EncoderTrace",
    "FEATURE_CHANNELS",
    "INPUT_CHANNELS",
    "KERNEL_SHAPES",
    "LAYER1_CHANNELS",
    "encode",
    "snn_backward",
    "snn_forward",
]
