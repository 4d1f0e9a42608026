"""Occluded-scene reconstruction: accumulation baseline, hybrid network and metrics."""

from .accumulation import reconstruct_acc
from .checkpoint import load_checkpoint, save_checkpoint
from .decoder import DECODER_INPUT_CHANNELS, DecoderParams, decoder_forward, decoder_input
from .hybrid import reconstruct_hybrid
from .losses import REFERENCE_WEIGHTS, LossWeights, loss_pixel, loss_tv, total_loss
from .metrics import PSNR_CAP_DB, psnr, ssim
from .training import (
    TrainConfig,
    TrainHistory,
    build_example,
    build_examples,
    ground_truth_warp,
    train,
    write_history,
)

__all__ = [
    "DECODER_INPUT_CHANNELS",
    "DecoderParams",
    "LossWeights",
    "PSNR_CAP_DB",
    "REFERENCE_WEIGHTS",
    "TrainConfig",
    "TrainHistory",
    "build_example",
    "build_examples",
    "decoder_forward",
    "decoder_input",
    "ground_truth_warp",
    "load_checkpoint",
    "loss_pixel",
    "loss_tv",
    "psnr",
    "reconstruct_acc",
    "reconstruct_hybrid",
    "save_checkpoint",
    "ssim",
    "total_loss",
    "train",
    "write_history",
]
