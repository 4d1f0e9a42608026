"""Leaky integrate-and-fire dynamics with a rectangular surrogate gradient.

``u(t) = alpha * u(t-1) * (1 - o(t-1)) + I(t)`` and ``o(t) = [u(t) > U_th]``.
The backward pass replaces the step derivative by ``1/w`` on
``|u - U_th| < w/2``. The relaxed variant swaps the step for its clipped-ramp
antiderivative so the whole forward becomes piecewise differentiable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch

from esai.common.errors import InvalidArgumentError


@dataclass(frozen=True)
class LifConfig:
    """Neuron constants; ``u_rest`` is fixed at zero."""

    alpha: float = 0.9
    u_th: float = 1.0
    u_rest: float = 0.0
    surrogate_width: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidArgumentError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not self.u_th > 0:
            raise InvalidArgumentError(f"u_th must be positive, got {self.u_th}")
        if self.u_rest != 0.0:
            raise InvalidArgumentError("u_rest is fixed at 0")
        if not (self.surrogate_width > 0 and math.isfinite(self.surrogate_width)):
            raise InvalidArgumentError(
                f"surrogate_width must be positive, got {self.surrogate_width}"
            )


@dataclass(frozen=True)
class LifLayerState:
    """Membrane potential and last spikes of one layer."""

    u: torch.Tensor
    o_prev: torch.Tensor

    @classmethod
    def zeros(
        cls, shape: tuple[int, ...], dtype: torch.dtype = torch.float64
    ) -> "LifLayerState":
        return cls(torch.zeros(shape, dtype=dtype), torch.zeros(shape, dtype=dtype))


class SpikeFunction(torch.autograd.Function):
    """Strict threshold in the forward pass, rectangular window in the backward pass."""

    @staticmethod
    def forward(ctx, u: torch.Tensor, u_th: float, width: float) -> torch.Tensor:  # type: ignore[override]
        ctx.save_for_backward(u)
        ctx.u_th = u_th
        ctx.width = width
        return (u > u_th).to(u.dtype)

    @staticmethod
    def backward(ctx, grad_output: torch.Tensor):  # type: ignore[override]
        (u,) = ctx.saved_tensors
        window = (torch.abs(u - ctx.u_th) < ctx.width / 2).to(grad_output.dtype)
        return grad_output * window / ctx.width, None, None


def surrogate_grad(u: float | torch.Tensor, cfg: LifConfig) -> float | torch.Tensor:
    """Surrogate ``do/du``: ``1/w`` inside the window around the threshold, else 0."""

    width = cfg.surrogate_width
    if isinstance(u, torch.Tensor):
        return (torch.abs(u - cfg.u_th) < width / 2).to(u.dtype) / width
    return 1.0 / width if abs(u - cfg.u_th) < width / 2 else 0.0


def relaxed_spike(u: torch.Tensor, cfg: LifConfig) -> torch.Tensor:
    """Clipped ramp whose derivative is the surrogate window."""

    return torch.clamp((u - cfg.u_th) / cfg.surrogate_width + 0.5, 0.0, 1.0)


def lif_step(
    state: LifLayerState,
    current: torch.Tensor,
    cfg: LifConfig,
    *,
    relaxed: bool = False,
) -> tuple[LifLayerState, torch.Tensor]:
    """Advance one layer by one time step.

    In the binary mode the reset gate ``1 - o(t-1)`` is a constant of the
    backward pass; in the relaxed mode it stays differentiable.
    """

    if current.shape != state.u.shape:
        raise InvalidArgumentError(
            f"input current shape {tuple(current.shape)} does not match state {tuple(state.u.shape)}"
        )
    previous = state.o_prev if relaxed else state.o_prev.detach()
    u = cfg.alpha * state.u * (1.0 - previous) + current
    if relaxed:
        spikes = relaxed_spike(u, cfg)
    else:
        spikes = SpikeFunction.apply(u, cfg.u_th, cfg.surrogate_width)
    return LifLayerState(u, spikes), spikes


__all__ = [
    "LifConfig",
    "LifLayerState",
    "SpikeFunction",
    "lif_step",
    "relaxed_spike",
    "surrogate_grad",
]
