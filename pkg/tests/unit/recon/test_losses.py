from __future__ import annotations

import itertools

import numpy as np
import pytest
import torch

from esai.common import InvalidArgumentError
from esai.recon import REFERENCE_WEIGHTS, LossWeights, loss_pixel, loss_tv, total_loss


def _tv_reference(image: np.ndarray) -> float:
    vertical = np.abs(np.diff(image, axis=0)).mean() if image.shape[0] > 1 else 0.0
    horizontal = np.abs(np.diff(image, axis=1)).mean() if image.shape[1] > 1 else 0.0
    return float(vertical + horizontal)


def test_pixel_loss_cases() -> None:
    rng = np.random.default_rng(0)
    a, b = rng.random((3, 5, 6)), rng.random((3, 5, 6))

    assert float(loss_pixel(a, a)) == 0.0
    assert float(loss_pixel(np.zeros((4, 4)), np.ones((4, 4)))) == 1.0
    brute = sum(abs(x - y) for x, y in zip(a.ravel(), b.ravel())) / a.size
    assert float(loss_pixel(a, b)) == pytest.approx(brute)


def test_pixel_loss_shape_mismatch() -> None:
    with pytest.raises(InvalidArgumentError, match="shapes differ"):
        loss_pixel(np.zeros((2, 2)), np.zeros((2, 3)))


def test_tv_examples() -> None:
    assert float(loss_tv(np.full((5, 5), 0.3))) == 0.0
    assert float(loss_tv(np.array([[0.0, 1.0]]))) == 1.0


def test_tv_matches_reference_on_random_images() -> None:
    rng = np.random.default_rng(1)
    for _ in range(20):
        image = rng.random(tuple(rng.integers(1, 7, size=2)))

        assert float(loss_tv(image)) == pytest.approx(_tv_reference(image))


def test_checkerboard_maximises_tv_over_binary_images() -> None:
    best = max(
        _tv_reference(np.array(bits, dtype=np.float64).reshape(4, 4))
        for bits in itertools.product((0, 1), repeat=16)
    )
    checkerboard = np.indices((4, 4)).sum(axis=0) % 2

    assert float(loss_tv(checkerboard)) == pytest.approx(best)
    assert best == pytest.approx(2.0)


def test_tv_is_differentiable() -> None:
    image = torch.tensor([[0.0, 1.0], [0.5, 0.25]], dtype=torch.float64, requires_grad=True)

    loss_tv(image).backward()

    assert torch.isfinite(image.grad).all()
    assert image.grad.abs().sum() > 0


def test_total_loss_weighting() -> None:
    rng = np.random.default_rng(2)
    target, output = rng.random((6, 6)), rng.random((6, 6))
    pix, tv = float(loss_pixel(target, output)), float(loss_tv(output))

    assert float(total_loss(np.full((3, 3), 0.4), np.full((3, 3), 0.4))) == 0.0
    reference = float(total_loss(target, output, LossWeights(*REFERENCE_WEIGHTS)))
    assert reference == pytest.approx(32 * pix + 2e-4 * tv)
    single = float(total_loss(target, output, LossWeights(1.5, 0.3)))
    double = float(total_loss(target, output, LossWeights(3.0, 0.6)))
    assert double == pytest.approx(2 * single)


@pytest.mark.parametrize("kwargs", [{"beta_pix": -1.0}, {"beta_tv": -0.1}, {"beta_per": 1.0}])
def test_loss_weights_validation(kwargs: dict) -> None:
    with pytest.raises(InvalidArgumentError):
        LossWeights(**kwargs)
