"""Convolutional decoder turning spike rates into an intensity image."""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn.functional as F

from esai.common.errors import InvalidArgumentError
from esai.snn.encoder import FEATURE_CHANNELS, INPUT_CHANNELS, LAYER1_CHANNELS

DECODER_INPUT_CHANNELS = FEATURE_CHANNELS + LAYER1_CHANNELS + INPUT_CHANNELS
DECODER_LAYERS = ((DECODER_INPUT_CHANNELS, 16), (16, 8), (8, 1))
KERNEL_SIZE = 3


@dataclass
class DecoderParams:
    """Weights (out, in, 3, 3) and biases of the three decoder convolutions."""

    weights: list[torch.Tensor]
    biases: list[torch.Tensor]

    def __post_init__(self) -> None:
        if len(self.weights) != len(DECODER_LAYERS) or len(self.biases) != len(DECODER_LAYERS):
            raise InvalidArgumentError(f"decoder needs {len(DECODER_LAYERS)} weight/bias pairs")
        for index, ((channels_in, channels_out), weight, bias) in enumerate(
            zip(DECODER_LAYERS, self.weights, self.biases), start=1
        ):
            expected = (channels_out, channels_in, KERNEL_SIZE, KERNEL_SIZE)
            if tuple(weight.shape) != expected or tuple(bias.shape) != (channels_out,):
                raise InvalidArgumentError(
                    f"decoder layer {index} expects weight {expected} and bias ({channels_out},)"
                )
            if not (torch.isfinite(weight).all() and torch.isfinite(bias).all()):
                raise InvalidArgumentError(f"decoder layer {index} holds non-finite values")

    @classmethod
    def init(
        cls, seed: int = 0, *, dtype: torch.dtype = torch.float32, zero: bool = False
    ) -> "DecoderParams":
        generator = torch.Generator().manual_seed(seed)
        weights, biases = [], []
        for channels_in, channels_out in DECODER_LAYERS:
            shape = (channels_out, channels_in, KERNEL_SIZE, KERNEL_SIZE)
            if zero:
                weights.append(torch.zeros(shape, dtype=dtype))
            else:
                scale = math.sqrt(2.0 / (channels_in * KERNEL_SIZE * KERNEL_SIZE))
                weights.append(torch.randn(shape, generator=generator, dtype=dtype) * scale)
            biases.append(torch.zeros(channels_out, dtype=dtype))
        return cls(weights, biases)

    @property
    def dtype(self) -> torch.dtype:
        return self.weights[0].dtype

    def parameters(self) -> list[torch.Tensor]:
        return [*self.weights, *self.biases]

    def requires_grad_(self, flag: bool = True) -> "DecoderParams":
        for tensor in self.parameters():
            tensor.requires_grad_(flag)
        return self

    def detached(self) -> "DecoderParams":
        return DecoderParams(
            [weight.detach().clone() for weight in self.weights],
            [bias.detach().clone() for bias in self.biases],
        )


def decoder_input(
    features: torch.Tensor, layer1_rate: torch.Tensor, frames: torch.Tensor
) -> torch.Tensor:
    """Concatenate layer-3 rates, layer-1 rates and the mean event frame (B, 42, H, W)."""

    mean_frame = frames.to(features.dtype).mean(dim=1)
    return torch.cat((features, layer1_rate, mean_frame), dim=1)


def decoder_forward(inputs: torch.Tensor, params: DecoderParams) -> torch.Tensor:
    """Decode (B, 42, H, W) or (42, H, W) inputs into images in (0, 1)."""

    single = inputs.ndim == 3
    x = inputs.unsqueeze(0) if single else inputs
    if x.ndim != 4 or x.shape[1] != DECODER_INPUT_CHANNELS:
        raise InvalidArgumentError(
            f"decoder expects {DECODER_INPUT_CHANNELS} input channels, got shape {tuple(inputs.shape)}"
        )
    x = x.to(params.dtype)
    last = len(DECODER_LAYERS) - 1
    for index, (weight, bias) in enumerate(zip(params.weights, params.biases)):
        x = F.conv2d(_pad(x), weight, bias)
        x = torch.sigmoid(x) if index == last else torch.relu(x)
    return x[0] if single else x


def _pad(x: torch.Tensor) -> torch.Tensor:
    mode = "reflect" if min(x.shape[-2:]) > 1 else "replicate"
    return F.pad(x, (1, 1, 1, 1), mode=mode)


__all__ = [
    "DECODER_INPUT_CHANNELS",
    "DECODER_LAYERS",
    "DecoderParams",
    "decoder_forward",
    "decoder_input",
]
