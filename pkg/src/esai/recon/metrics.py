"""Image-quality metrics: PSNR and single-scale SSIM."""

from __future__ import annotations

import math

import numpy as np
from skimage.metrics import structural_similarity

from esai.common.errors import InvalidArgumentError
from esai.events.types import GrayImage

PSNR_CAP_DB = 99.0
SSIM_SIGMA = 1.5


def _pair(a: GrayImage | np.ndarray, b: GrayImage | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    left = a.data if isinstance(a, GrayImage) else np.asarray(a, dtype=np.float64)
    right = b.data if isinstance(b, GrayImage) else np.asarray(b, dtype=np.float64)
    if left.shape != right.shape:
        raise InvalidArgumentError(f"image shapes differ: {left.shape} vs {right.shape}")
    return left.astype(np.float64), right.astype(np.float64)


def psnr(a: GrayImage | np.ndarray, b: GrayImage | np.ndarray, peak: float = 1.0) -> float:
    """``10 log10(peak^2 / MSE)`` in dB, capped at 99 dB."""

    if not peak > 0:
        raise InvalidArgumentError(f"peak must be positive, got {peak}")
    left, right = _pair(a, b)
    mse = float(np.mean((left - right) ** 2))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, 10.0 * math.log10(peak * peak / mse))


def ssim(a: GrayImage | np.ndarray, b: GrayImage | np.ndarray, peak: float = 1.0) -> float:
    """Mean SSIM over 11x11 Gaussian windows (sigma 1.5, k1 0.01, k2 0.03)."""

    if not peak > 0:
        raise InvalidArgumentError(f"peak must be positive, got {peak}")
    left, right = _pair(a, b)
    try:
        return float(
            structural_similarity(
                left,
                right,
                data_range=peak,
                gaussian_weights=True,
                sigma=SSIM_SIGMA,
                use_sample_covariance=False,
                K1=0.01,
                K2=0.03,
            )
        )
    except ValueError as exc:
        raise InvalidArgumentError(f"SSIM needs images of at least 11x11 pixels ({exc})") from exc


__all__ = ["PSNR_CAP_DB", "psnr", "ssim"]
