"""Joint training of the spiking encoder and the convolutional decoder."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import torch

from esai.common.errors import DataError, InvalidArgumentError, TrainingDivergedError
from esai.events.dataset import frame_to_unit
from esai.events.stacking import stack_events
from esai.events.types import DatasetSample, FrameStack, GrayImage
from esai.recon.decoder import DecoderParams, decoder_forward, decoder_input
from esai.recon.losses import LossWeights, total_loss
from esai.recon.metrics import psnr
from esai.refocus.warp import WarpParam, compute_psi, warp_events
from esai.snn.encoder import DEFAULT_INTERVALS, EncoderParams, encode
from esai.snn.lif import LifConfig

LOGGER = logging.getLogger(__name__)

HISTORY_HEADER = ("epoch", "loss", "psnr_val")

TrainingExample = tuple[FrameStack, GrayImage]


@dataclass(frozen=True)
class TrainConfig:
    """Optimiser settings; the learning rate follows cosine restarts every ``restart_period`` epochs."""

    epochs: int = 40
    batch_size: int = 4
    learning_rate: float = 5e-4
    restart_period: int = 64
    seed: int = 0
    intervals: int = DEFAULT_INTERVALS

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise InvalidArgumentError(f"epochs must be non-negative, got {self.epochs}")
        if self.batch_size < 1:
            raise InvalidArgumentError(f"batch_size must be positive, got {self.batch_size}")
        if not self.learning_rate > 0:
            raise InvalidArgumentError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.restart_period < 1:
            raise InvalidArgumentError(f"restart_period must be positive, got {self.restart_period}")
        if self.intervals < 1:
            raise InvalidArgumentError(f"intervals must be positive, got {self.intervals}")


@dataclass
class TrainHistory:
    epochs: list[int] = field(default_factory=list)
    losses: list[float] = field(default_factory=list)
    psnr_val: list[float] = field(default_factory=list)

    def record(self, epoch: int, loss: float, validation_psnr: float) -> None:
        self.epochs.append(epoch)
        self.losses.append(loss)
        self.psnr_val.append(validation_psnr)

    def __len__(self) -> int:
        return len(self.epochs)


def ground_truth_warp(sample: DatasetSample) -> WarpParam:
    """ψ from the sample metadata (``fy``, ``v_y`` and ``t_ref`` extras when present)."""

    extra = sample.extra
    start, end = sample.events.t_span
    fy = float(extra.get("fy", sample.fx))
    v_y = float(extra.get("v_y", 0.0))
    t_ref = int(extra.get("t_ref", (start + end) // 2))
    return compute_psi((sample.fx, fy), (sample.v, v_y), sample.depth, t_ref)


def build_example(
    sample: DatasetSample, intervals: int, warp: WarpParam | None = None
) -> TrainingExample:
    """Refocus ``sample`` (ground-truth ψ by default) and pair its frame stack with the clear frame."""

    warp = warp or ground_truth_warp(sample)
    start, end = sample.events.t_span
    if end <= start:
        raise InvalidArgumentError("sample event window is empty; cannot build a frame stack")
    stack = stack_events(warp_events(sample.events, warp), intervals, (start, end))
    truth = GrayImage(frame_to_unit(sample.occ_free_aps.image), (0.0, 1.0))
    return stack, truth


def build_examples(samples: Sequence[DatasetSample], intervals: int) -> list[TrainingExample]:
    return [build_example(sample, intervals) for sample in samples]


def train(
    dataset: Sequence[TrainingExample],
    cfg: TrainConfig = TrainConfig(),
    *,
    weights: LossWeights = LossWeights(),
    lif: LifConfig = LifConfig(),
    validation: Sequence[TrainingExample] = (),
) -> tuple[EncoderParams, DecoderParams, TrainHistory]:
    """Train encoder and decoder with Adam and cosine warm restarts.

    Runs are reproducible for a given ``cfg.seed``.
    """

    if not dataset:
        raise InvalidArgumentError("training needs at least one example")
    frames, truth = _batch_tensors(dataset, cfg.intervals)
    validation_tensors = _batch_tensors(validation, cfg.intervals) if validation else None

    torch.manual_seed(cfg.seed)
    encoder = EncoderParams.init(cfg.seed, lif=(lif, lif, lif), intervals=cfg.intervals)
    decoder = DecoderParams.init(cfg.seed + 1)
    history = TrainHistory()
    if cfg.epochs == 0:
        return encoder, decoder, history

    deterministic = torch.are_deterministic_algorithms_enabled()
    torch.use_deterministic_algorithms(True)
    encoder.requires_grad_(True)
    decoder.requires_grad_(True)
    optimizer = torch.optim.Adam([*encoder.parameters(), *decoder.parameters()], lr=cfg.learning_rate)
    scheduler = torch.optim.lr_scheduler.CosineAnnealingWarmRestarts(optimizer, T_0=cfg.restart_period)
    generator = torch.Generator().manual_seed(cfg.seed)
    try:
        for epoch in range(1, cfg.epochs + 1):
            order = torch.randperm(frames.shape[0], generator=generator)
            total, seen = 0.0, 0
            for begin in range(0, len(order), cfg.batch_size):
                index = order[begin : begin + cfg.batch_size]
                optimizer.zero_grad()
                output = _predict(frames[index], encoder, decoder)
                loss = total_loss(truth[index], output, weights)
                value = float(loss.detach())
                if not math.isfinite(value):
                    raise TrainingDivergedError(epoch, value)
                loss.backward()
                optimizer.step()
                total += value * len(index)
                seen += len(index)
            scheduler.step()
            mean_loss = total / seen
            validation_psnr = (
                _validation_psnr(validation_tensors, encoder, decoder)
                if validation_tensors is not None
                else float("nan")
            )
            history.record(epoch, mean_loss, validation_psnr)
            LOGGER.info("Epoch %d/%d loss=%.6f psnr_val=%.3f", epoch, cfg.epochs, mean_loss, validation_psnr)
    finally:
        torch.use_deterministic_algorithms(deterministic)
    return encoder.detached(), decoder.detached(), history


def write_history(history: TrainHistory, path: Path | str) -> None:
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(HISTORY_HEADER)
            for epoch, loss, value in zip(history.epochs, history.losses, history.psnr_val):
                writer.writerow((epoch, repr(loss), repr(value)))
    except OSError as exc:
        raise DataError(f"{path}: failed to write training history ({exc})") from exc


def _predict(frames: torch.Tensor, encoder: EncoderParams, decoder: DecoderParams) -> torch.Tensor:
    trace = encode(frames, encoder)
    return decoder_forward(decoder_input(trace.features, trace.layer1_rate, frames), decoder)


def _validation_psnr(
    tensors: tuple[torch.Tensor, torch.Tensor], encoder: EncoderParams, decoder: DecoderParams
) -> float:
    frames, truth = tensors
    with torch.no_grad():
        output = _predict(frames, encoder, decoder)
    scores = [
        psnr(truth[index, 0].double().numpy(), output[index, 0].double().numpy())
        for index in range(frames.shape[0])
    ]
    return float(np.mean(scores))


def _batch_tensors(
    examples: Sequence[TrainingExample], intervals: int
) -> tuple[torch.Tensor, torch.Tensor]:
    shapes = {example[0].size for example in examples}
    if len(shapes) != 1:
        raise InvalidArgumentError(f"all examples must share one resolution, got {sorted(shapes)}")
    stacks, truths = [], []
    for index, (stack, truth) in enumerate(examples):
        if stack.intervals != intervals:
            raise InvalidArgumentError(
                f"example {index} has {stack.intervals} intervals, expected {intervals}"
            )
        if truth.shape != stack.size:
            raise InvalidArgumentError(f"example {index}: truth shape {truth.shape} != {stack.size}")
        if truth.data.min() < 0.0 or truth.data.max() > 1.0:
            raise InvalidArgumentError(f"example {index}: truth image must lie in [0, 1]")
        stacks.append(stack.data)
        truths.append(truth.data[np.newaxis])
    frames = torch.as_tensor(np.stack(stacks), dtype=torch.float32)
    truth_tensor = torch.as_tensor(np.stack(truths), dtype=torch.float32)
    return frames, truth_tensor


__all__ = [
    "HISTORY_HEADER",
    "TrainConfig",
    "TrainHistory",
    "TrainingExample",
    "build_example",
    "build_examples",
    "ground_truth_warp",
    "train",
    "write_history",
]
