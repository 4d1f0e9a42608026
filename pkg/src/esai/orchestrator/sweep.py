"""Sequential execution of occlusion-density and occlusion-texture sweeps.

Each value of the swept parameter becomes one run directory holding the
simulated sample, both reconstructions and a ``metrics.txt`` summary.
"""

from __future__ import annotations

import dataclasses
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from esai.common.errors import EsaiError, InvalidArgumentError
from esai.common.formatting import format_duration
from esai.common.raster import write_pgm
from esai.config import SceneConfig, SearchConfig
from esai.events.dataset import frame_to_unit
from esai.events.types import GrayImage
from esai.recon.accumulation import reconstruct_acc
from esai.recon.decoder import DecoderParams
from esai.recon.hybrid import reconstruct_hybrid
from esai.recon.metrics import psnr, ssim
from esai.recon.training import ground_truth_warp
from esai.refocus.autofocus import SearchParams, auto_refocus
from esai.refocus.warp import warp_events
from esai.simulation.builder import simulate_from_config, stripe_count
from esai.simulation.emulator import export_sample
from esai.snn.encoder import EncoderParams

LOGGER = logging.getLogger(__name__)

SWEEP_PARAMETERS = ("r_o", "r_t")
METRICS_FILENAME = "metrics.txt"
SAMPLE_DIRECTORY = "sample"
HYBRID_FILENAME = "recon.pgm"
ACC_FILENAME = "acc.pgm"


@dataclass(frozen=True)
class SweepRun:
    name: str
    parameter: str
    value: float
    directory: Path
    status: str = "pending"


def search_params(config: SearchConfig) -> SearchParams:
    bounds_y = None
    if config.psi_y_min is not None and config.psi_y_max is not None:
        bounds_y = (config.psi_y_min, config.psi_y_max)
    return SearchParams(
        psi_bounds_x=(config.psi_x_min, config.psi_x_max),
        psi_bounds_y=bounds_y,
        grid_points=config.grid_points,
        refine_iters=config.refine_iters,
        metric=config.metric,
        voting=config.voting,
        tau=config.tau,
    )


def scene_for(base: SceneConfig, parameter: str, value: float) -> SceneConfig:
    """Apply one sweep value; ``r_t`` selects striped slats with ``2 r_t + 1`` stripes."""

    if parameter == "r_o":
        return dataclasses.replace(base, r_o=value)
    if parameter == "r_t":
        scene = dataclasses.replace(base, occluder="stripes", stripes=1, r_t=value)
        stripe_count(scene)
        return scene
    raise InvalidArgumentError(f"sweep parameter must be one of {SWEEP_PARAMETERS}, got {parameter!r}")


class SweepOrchestrator:
    """Simulate, refocus and reconstruct one scene per sweep value."""

    def __init__(
        self,
        base: SceneConfig,
        encoder: EncoderParams,
        decoder: DecoderParams,
        *,
        search: SearchConfig | None = None,
    ) -> None:
        self._base = base
        self._encoder = encoder
        self._decoder = decoder
        self._search = search

    def run_sweep(self, parameter: str, values: Sequence[float], out_dir: Path) -> list[SweepRun]:
        if not values:
            raise InvalidArgumentError("a sweep needs at least one value")
        configs = [scene_for(self._base, parameter, float(value)) for value in values]
        out_dir.mkdir(parents=True, exist_ok=True)
        runs: list[SweepRun] = []
        failed: str | None = None
        started = time.monotonic()
        for index, (value, config) in enumerate(zip(values, configs)):
            name = f"{parameter}_{index:02d}"
            directory = out_dir / name
            if failed is not None:
                LOGGER.warning("Skipping run %s after failure of %s", name, failed)
                runs.append(SweepRun(name, parameter, float(value), directory, "skipped"))
                continue
            LOGGER.info("Running %s (%s=%s)", name, parameter, value)
            try:
                self._run_one(config, directory, name)
            except EsaiError:
                LOGGER.exception("Sweep run %s failed", name)
                failed = name
                runs.append(SweepRun(name, parameter, float(value), directory, "failure"))
                continue
            runs.append(SweepRun(name, parameter, float(value), directory, "success"))
        LOGGER.info(
            "Sweep over %s finished: %d runs in %s",
            parameter,
            len(runs),
            format_duration(time.monotonic() - started),
        )
        return runs

    def _run_one(self, config: SceneConfig, directory: Path, name: str) -> None:
        _, sample = simulate_from_config(config)
        directory.mkdir(parents=True, exist_ok=True)
        export_sample(sample, directory / SAMPLE_DIRECTORY)

        if self._search is None:
            warp = ground_truth_warp(sample)
        else:
            warp = auto_refocus(sample.events, search_params(self._search))
        truth = GrayImage(frame_to_unit(sample.occ_free_aps.image), (0.0, 1.0))
        hybrid = reconstruct_hybrid(sample.events, warp, self._encoder, self._decoder)
        acc = reconstruct_acc(warp_events(sample.events, warp))
        write_pgm(directory / HYBRID_FILENAME, _to_uint8(hybrid))
        write_pgm(directory / ACC_FILENAME, _to_uint8(acc))

        occluder = sample.extra
        metrics = {
            "run": name,
            "status": "success",
            "r_o": occluder.get("r_o", repr(config.r_o)),
            "r_t": occluder.get("r_t", "0.0"),
            "psi_x": repr(warp.psi[0]),
            "psi_y": repr(warp.psi[1]),
            "psnr": repr(psnr(truth, hybrid)),
            "ssim": repr(ssim(truth, hybrid)),
            "psnr_acc": repr(psnr(truth, acc)),
            "ssim_acc": repr(ssim(truth, acc)),
        }
        text = "".join(f"{key}={value}\n" for key, value in metrics.items())
        (directory / METRICS_FILENAME).write_text(text, encoding="utf-8")


def _to_uint8(image: GrayImage) -> np.ndarray:
    return np.clip(np.rint(image.data * 255.0), 0, 255).astype(np.uint8)


__all__ = [
    "METRICS_FILENAME",
    "SWEEP_PARAMETERS",
    "SweepOrchestrator",
    "SweepRun",
    "scene_for",
    "search_params",
]
