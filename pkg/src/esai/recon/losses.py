"""Reconstruction losses: pixel L1, anisotropic total variation and their weighted sum."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from esai.common.errors import InvalidArgumentError

REFERENCE_WEIGHTS = (32.0, 2e-4)


@dataclass(frozen=True)
class LossWeights:
    """Loss weights; the perceptual slot ``beta_per`` is kept at zero."""

    beta_pix: float = 1.0
    beta_tv: float = 0.02
    beta_per: float = 0.0

    def __post_init__(self) -> None:
        if self.beta_pix < 0 or self.beta_tv < 0:
            raise InvalidArgumentError("loss weights must be non-negative")
        if self.beta_per != 0.0:
            raise InvalidArgumentError("the perceptual loss is not available; beta_per must be 0")


def _tensor(value: torch.Tensor | np.ndarray) -> torch.Tensor:
    if isinstance(value, torch.Tensor):
        return value
    return torch.as_tensor(np.asarray(value, dtype=np.float64))


def loss_pixel(target: torch.Tensor | np.ndarray, output: torch.Tensor | np.ndarray) -> torch.Tensor:
    """Mean absolute error."""

    target, output = _tensor(target), _tensor(output)
    if target.shape != output.shape:
        raise InvalidArgumentError(
            f"shapes differ: {tuple(target.shape)} vs {tuple(output.shape)}"
        )
    return torch.mean(torch.abs(target - output))


def loss_tv(image: torch.Tensor | np.ndarray) -> torch.Tensor:
    """Mean |vertical difference| plus mean |horizontal difference| over the last two axes."""

    image = _tensor(image)
    total = image.new_zeros(())
    if image.shape[-2] > 1:
        total = total + torch.mean(torch.abs(image[..., 1:, :] - image[..., :-1, :]))
    if image.shape[-1] > 1:
        total = total + torch.mean(torch.abs(image[..., :, 1:] - image[..., :, :-1]))
    return total


def total_loss(
    target: torch.Tensor | np.ndarray,
    output: torch.Tensor | np.ndarray,
    weights: LossWeights = LossWeights(),
) -> torch.Tensor:
    """``beta_pix * L_pix(Y, Y_hat) + beta_tv * L_tv(Y_hat)``."""

    return weights.beta_pix * loss_pixel(target, output) + weights.beta_tv * loss_tv(output)


__all__ = ["LossWeights", "REFERENCE_WEIGHTS", "loss_pixel", "loss_tv", "total_loss"]
