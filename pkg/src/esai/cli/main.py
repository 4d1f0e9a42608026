"""Command line interface for the event-based synthetic aperture imaging toolkit."""

from __future__ import annotations

import logging
import math
import sys
from pathlib import Path
from typing import Sequence

import click
import numpy as np

from esai.common.errors import EsaiError, InvalidArgumentError
from esai.common.formatting import format_metric, format_psi, humanize_status
from esai.common.raster import read_pgm, write_pgm
from esai.common.threads import THREADS_ENV_VAR, apply_thread_limit
from esai.config import SceneConfig, SearchConfig, TrainSettings, load_config, parse_overrides
from esai.events.dataset import frame_to_unit, load_sample
from esai.events.io import read_events, write_events
from esai.events.types import DatasetSample, EventStream, GrayImage
from esai.orchestrator import SweepOrchestrator, collect_runs, search_params, write_report
from esai.recon import (
    LossWeights,
    TrainConfig,
    build_examples,
    ground_truth_warp,
    load_checkpoint,
    psnr,
    reconstruct_acc,
    reconstruct_hybrid,
    save_checkpoint,
    ssim,
    train,
    write_history,
)
from esai.refocus import WarpParam, apse, auto_refocus, epi_slice, warp_events, write_epi
from esai.simulation import corpus_configs, simulate_from_config, synthetic_corpus
from esai.simulation.emulator import export_sample
from esai.snn import LifConfig

LOGGER = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
PSI_SIDECAR_SUFFIX = ".psi"

existing_dir = click.Path(exists=True, file_okay=False, path_type=Path)
existing_file = click.Path(exists=True, dir_okay=False, path_type=Path)
output_path = click.Path(dir_okay=False, path_type=Path)


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="WARNING",
    show_default=True,
    help="Diagnostics verbosity (written to stderr).",
)
def cli(log_level: str) -> None:
    """Simulate, refocus and reconstruct occluded scenes from event streams."""

    logging.basicConfig(level=log_level.upper(), format=LOG_FORMAT, stream=sys.stderr, force=True)
    threads = apply_thread_limit()
    if threads:
        LOGGER.debug("%s caps torch at %d threads", THREADS_ENV_VAR, threads)


@cli.command("simulate")
@click.option("--scene", "scene_path", type=existing_file, help="Scene config (key=value or YAML).")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="Override a scene key.")
@click.option("--seed", type=int, default=None, help="Override the scene seed.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False, path_type=Path))
def simulate_command(
    scene_path: Path | None, overrides: Sequence[str], seed: int | None, out_dir: Path
) -> None:
    """Simulate an occluded scene and write a dataset sample directory."""

    config = _scene_config(scene_path, overrides, seed)
    labeled, sample = simulate_from_config(config)
    export_sample(sample, out_dir)
    click.echo(
        f"Wrote {len(labeled.stream)} events to {out_dir} "
        f"(r_o={sample.extra['r_o_measured'][:6]} measured)"
    )


@cli.command("refocus")
@click.option("--sample", "sample_dir", type=existing_dir, help="Dataset sample directory.")
@click.option("--in", "events_path", type=existing_file, help="Event file (.bin or .csv).")
@click.option("--resolution", default=None, metavar="WxH", help="Resolution for CSV input.")
@click.option("--psi", default="auto", show_default=True, help="auto, from-meta, px,py or a .psi file.")
@click.option("--bounds", default=None, metavar="LO:HI", help="ψ_x search bounds (px/s).")
@click.option("--bounds-y", default=None, metavar="LO:HI", help="ψ_y search bounds; ψ_y=0 if omitted.")
@click.option("--search", "search_path", type=existing_file, help="Search config file.")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="Override a search key.")
@click.option("--out", "out_path", required=True, type=output_path)
def refocus_command(
    sample_dir: Path | None,
    events_path: Path | None,
    resolution: str | None,
    psi: str,
    bounds: str | None,
    bounds_y: str | None,
    search_path: Path | None,
    overrides: Sequence[str],
    out_path: Path,
) -> None:
    """Warp events onto the reference view and write them rounded to pixels.

    ψ and t_ref go to the sidecar file ``<out>.psi``.
    """

    sample, stream = _load_input(sample_dir, events_path, resolution)
    search = _search_config(search_path, overrides, bounds, bounds_y)
    warp = _resolve_psi(psi, sample, stream, search)
    refocused = warp_events(stream, warp).to_pixels()
    write_events(refocused, out_path)
    _write_sidecar(out_path, warp)
    click.echo(
        f"Refocused {len(stream)} events with psi={format_psi(warp.psi)}; "
        f"{len(stream) - len(refocused)} left the frame"
    )


@cli.command("epi")
@click.option("--sample", "sample_dir", type=existing_dir)
@click.option("--in", "events_path", type=existing_file)
@click.option("--resolution", default=None, metavar="WxH")
@click.option("--row", required=True, type=int, help="Sensor row to slice.")
@click.option("--bins", default=64, show_default=True, type=int, help="Viewpoint (time) bins.")
@click.option("--mode", type=click.Choice(["merged", "signed"]), default="merged", show_default=True)
@click.option("--psi", default=None, help="Refocus first: auto, from-meta, px,py or a .psi file.")
@click.option("--out", "out_path", required=True, type=output_path, help=".pgm or .f32 output.")
def epi_command(
    sample_dir: Path | None,
    events_path: Path | None,
    resolution: str | None,
    row: int,
    bins: int,
    mode: str,
    psi: str | None,
    out_path: Path,
) -> None:
    """Write the event epipolar-plane image of one row."""

    sample, stream = _load_input(sample_dir, events_path, resolution)
    source = stream
    if psi is not None:
        source = warp_events(stream, _resolve_psi(psi, sample, stream, SearchConfig()))
    epi = epi_slice(source, row, bins, mode)
    write_epi(epi, out_path)
    click.echo(f"Wrote {bins}x{stream.width} EPI of row {row} to {out_path}")


@cli.command("acc")
@click.option("--in", "events_path", required=True, type=existing_file, help="Refocused events.")
@click.option("--resolution", default=None, metavar="WxH")
@click.option("--out", "out_path", required=True, type=output_path)
def acc_command(events_path: Path, resolution: str | None, out_path: Path) -> None:
    """Accumulation reconstruction of a refocused event file."""

    stream = read_events(events_path, resolution=_parse_resolution(resolution))
    image = reconstruct_acc(stream)
    write_pgm(out_path, _to_uint8(image))
    click.echo(f"Wrote accumulation image {stream.width}x{stream.height} to {out_path}")


@cli.command("train")
@click.option("--data", "data_dirs", multiple=True, type=existing_dir, help="Training sample directory.")
@click.option("--corpus", default=0, type=int, help="Simulate this many training scenes.")
@click.option("--scene", "scene_path", type=existing_file, help="Scene config for --corpus.")
@click.option("--config", "train_path", type=existing_file, help="Training config file.")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="Override a training key.")
@click.option("--out", "out_path", required=True, type=output_path, help="Checkpoint path.")
@click.option("--history", "history_path", type=output_path, help="CSV history (default <out>.csv).")
def train_command(
    data_dirs: Sequence[Path],
    corpus: int,
    scene_path: Path | None,
    train_path: Path | None,
    overrides: Sequence[str],
    out_path: Path,
    history_path: Path | None,
) -> None:
    """Train the hybrid network on ground-truth refocused samples."""

    settings = load_config(TrainSettings, train_path, parse_overrides(overrides))
    samples = [load_sample(directory) for directory in data_dirs]
    if corpus > 0:
        base = _scene_config(scene_path, (), None)
        samples.extend(synthetic_corpus(corpus_configs(base, corpus, seed=settings.seed)))
    if not samples:
        raise click.UsageError("provide training samples with --data or --corpus")
    examples = build_examples(samples, settings.intervals)
    holdout = int(round(settings.validation_fraction * len(examples))) if len(examples) > 1 else 0
    training, validation = examples[: len(examples) - holdout], examples[len(examples) - holdout :]
    cfg = TrainConfig(
        epochs=settings.epochs,
        batch_size=settings.batch,
        learning_rate=settings.lr,
        restart_period=settings.restart_period,
        seed=settings.seed,
        intervals=settings.intervals,
    )
    weights = LossWeights(settings.beta_pix, settings.beta_tv, settings.beta_per)
    lif = LifConfig(
        alpha=settings.alpha, u_th=settings.threshold, surrogate_width=settings.surrogate_width
    )
    encoder, decoder, history = train(training, cfg, weights=weights, lif=lif, validation=validation)
    save_checkpoint(out_path, encoder, decoder)
    write_history(history, history_path or out_path.with_suffix(".csv"))
    final = history.losses[-1] if len(history) else float("nan")
    click.echo(
        f"Trained on {len(training)} samples ({len(validation)} held out) for {cfg.epochs} epochs; "
        f"final loss {format_metric(final)}"
    )


@cli.command("infer")
@click.option("--sample", "sample_dir", type=existing_dir)
@click.option("--in", "events_path", type=existing_file)
@click.option("--resolution", default=None, metavar="WxH")
@click.option("--checkpoint", "checkpoint_path", required=True, type=existing_file)
@click.option("--psi", default="from-meta", show_default=True, help="auto, from-meta, px,py or a .psi file.")
@click.option("--intervals-used", type=int, default=None, help="Use only the first k intervals.")
@click.option("--out", "out_path", required=True, type=output_path)
def infer_command(
    sample_dir: Path | None,
    events_path: Path | None,
    resolution: str | None,
    checkpoint_path: Path,
    psi: str,
    intervals_used: int | None,
    out_path: Path,
) -> None:
    """Hybrid reconstruction of one event stream."""

    sample, stream = _load_input(sample_dir, events_path, resolution)
    encoder, decoder = load_checkpoint(checkpoint_path)
    warp = _resolve_psi(psi, sample, stream, SearchConfig())
    image = reconstruct_hybrid(stream, warp, encoder, decoder, intervals_used=intervals_used)
    write_pgm(out_path, _to_uint8(image))
    click.echo(f"Wrote hybrid reconstruction to {out_path}")


@cli.command("eval")
@click.option("--metric", type=click.Choice(["apse", "psnr", "ssim"]), required=True)
@click.option("--sample", "sample_dir", type=existing_dir, help="Sample with metadata and clear frame.")
@click.option("--psi", default=None, help="Estimated ψ: auto, px,py or a .psi file (apse).")
@click.option("--gt-psi", default="from-meta", show_default=True, help="Ground-truth ψ (apse).")
@click.option("--image", "image_path", type=existing_file, help="Reconstruction PGM (psnr/ssim).")
@click.option("--reference", "reference_path", type=existing_file, help="Reference PGM; defaults to the sample's clear frame.")
def eval_command(
    metric: str,
    sample_dir: Path | None,
    psi: str | None,
    gt_psi: str,
    image_path: Path | None,
    reference_path: Path | None,
) -> None:
    """Print APSE, PSNR or SSIM."""

    sample = load_sample(sample_dir) if sample_dir is not None else None
    if metric == "apse":
        if sample is None or psi is None:
            raise click.UsageError("apse needs --sample and --psi")
        estimate = _resolve_psi(psi, sample, sample.events, SearchConfig())
        truth = _resolve_psi(gt_psi, sample, sample.events, SearchConfig())
        click.echo(f"apse={apse(estimate, truth, sample.events):.6f}")
        return
    if image_path is None:
        raise click.UsageError(f"{metric} needs --image")
    image = read_pgm(image_path).astype(np.float64) / 255.0
    if reference_path is not None:
        reference = read_pgm(reference_path).astype(np.float64) / 255.0
    elif sample is not None:
        reference = frame_to_unit(sample.occ_free_aps.image)
    else:
        raise click.UsageError(f"{metric} needs --reference or --sample")
    value = psnr(reference, image) if metric == "psnr" else ssim(reference, image)
    click.echo(f"{metric}={value:.6f}")


@cli.command("sweep")
@click.option("--scene", "scene_path", type=existing_file)
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE")
@click.option("--checkpoint", "checkpoint_path", required=True, type=existing_file)
@click.option("--param", "parameter", type=click.Choice(["r_o", "r_t"]), required=True)
@click.option("--values", required=True, help="Comma-separated sweep values.")
@click.option("--psi", type=click.Choice(["from-meta", "auto"]), default="from-meta", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False, path_type=Path))
def sweep_command(
    scene_path: Path | None,
    overrides: Sequence[str],
    checkpoint_path: Path,
    parameter: str,
    values: str,
    psi: str,
    out_dir: Path,
) -> None:
    """Run one scene over several r_o or r_t values, one run directory each."""

    base = _scene_config(scene_path, overrides, None)
    try:
        parsed = [float(value) for value in values.split(",") if value.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"invalid sweep values {values!r}", param_hint="--values") from exc
    encoder, decoder = load_checkpoint(checkpoint_path)
    orchestrator = SweepOrchestrator(
        base, encoder, decoder, search=SearchConfig() if psi == "auto" else None
    )
    runs = orchestrator.run_sweep(parameter, parsed, out_dir)
    for run in runs:
        click.echo(f"{run.name}: {parameter}={run.value:g} {humanize_status(run.status)}")
    if any(run.status != "success" for run in runs):
        raise EsaiError(f"sweep incomplete; see runs under {out_dir}")


@cli.command("report")
@click.option("--runs", "run_dir", required=True, type=click.Path(file_okay=False, path_type=Path))
@click.option("--out", "out_path", required=True, type=output_path, help="Summary CSV.")
@click.option("--plot", "plot_path", type=output_path, help="Plot panel PGM (default <out>.pgm).")
def report_command(run_dir: Path, out_path: Path, plot_path: Path | None) -> None:
    """Summarise sweep runs into a CSV table and a plot panel."""

    rows = collect_runs(run_dir)
    write_report(rows, out_path, plot_path or out_path.with_suffix(".pgm"))
    for row in rows:
        click.echo(
            f"{row.run}: r_o={row.r_o:.3f} r_t={row.r_t:.2f} "
            f"psnr={format_metric(row.psnr)} ssim={format_metric(row.ssim)}"
        )


def run(argv: Sequence[str] | None = None) -> int:
    """Execute the CLI and map failures onto exit codes (1 usage, 2 data, 3 numeric)."""

    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = cli.main(args=args, prog_name="esai", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except InvalidArgumentError as exc:
        click.echo(f"Error: {exc}", err=True)
        return 1
    except EsaiError as exc:
        click.echo(f"Error: {exc}", err=True)
        return exc.exit_code
    return result if isinstance(result, int) else 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


def _scene_config(path: Path | None, overrides: Sequence[str], seed: int | None) -> SceneConfig:
    values = parse_overrides(overrides)
    if seed is not None:
        values["seed"] = str(seed)
    return load_config(SceneConfig, path, values)


def _search_config(
    path: Path | None, overrides: Sequence[str], bounds: str | None, bounds_y: str | None
) -> SearchConfig:
    values = parse_overrides(overrides)
    if bounds is not None:
        values["psi_x_min"], values["psi_x_max"] = _parse_bounds(bounds, "--bounds")
    if bounds_y is not None:
        values["psi_y_min"], values["psi_y_max"] = _parse_bounds(bounds_y, "--bounds-y")
    return load_config(SearchConfig, path, values)


def _parse_bounds(text: str, hint: str) -> tuple[str, str]:
    low, separator, high = text.rpartition(":")
    try:
        if not separator or float(low) >= float(high):
            raise ValueError(text)
    except ValueError as exc:
        raise click.BadParameter(f"expected LO:HI with LO < HI, got {text!r}", param_hint=hint) from exc
    return low, high


def _parse_resolution(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        width, height = (int(part) for part in text.lower().split("x"))
    except ValueError as exc:
        raise click.BadParameter(f"expected WxH, got {text!r}", param_hint="--resolution") from exc
    return width, height


def _load_input(
    sample_dir: Path | None, events_path: Path | None, resolution: str | None
) -> tuple[DatasetSample | None, EventStream]:
    if (sample_dir is None) == (events_path is None):
        raise click.UsageError("give exactly one of --sample and --in")
    if sample_dir is not None:
        sample = load_sample(sample_dir)
        return sample, sample.events
    assert events_path is not None
    return None, read_events(events_path, resolution=_parse_resolution(resolution))


def _resolve_psi(
    value: str, sample: DatasetSample | None, stream: EventStream, search: SearchConfig
) -> WarpParam:
    start, end = stream.t_span
    if value == "auto":
        return auto_refocus(stream, search_params(search))
    if value == "from-meta":
        if sample is None:
            raise click.UsageError("--psi from-meta needs --sample")
        return ground_truth_warp(sample)
    sidecar = Path(value)
    if sidecar.suffix == PSI_SIDECAR_SUFFIX and sidecar.is_file():
        return _read_sidecar(sidecar)
    try:
        psi_x, psi_y = (float(part) for part in value.split(","))
    except ValueError as exc:
        raise click.BadParameter(
            f"expected auto, from-meta, px,py or a .psi file, got {value!r}", param_hint="--psi"
        ) from exc
    if not (math.isfinite(psi_x) and math.isfinite(psi_y)):
        raise click.BadParameter("psi components must be finite", param_hint="--psi")
    return WarpParam((psi_x, psi_y), (start + end) // 2)


def _write_sidecar(out_path: Path, warp: WarpParam) -> None:
    sidecar = Path(f"{out_path}{PSI_SIDECAR_SUFFIX}")
    sidecar.write_text(
        f"psi_x={warp.psi[0]!r}\npsi_y={warp.psi[1]!r}\nt_ref={warp.t_ref}\n", encoding="utf-8"
    )


def _read_sidecar(path: Path) -> WarpParam:
    values = dict(
        line.split("=", 1) for line in path.read_text(encoding="utf-8").splitlines() if "=" in line
    )
    try:
        return WarpParam((float(values["psi_x"]), float(values["psi_y"])), int(values["t_ref"]))
    except (KeyError, ValueError) as exc:
        raise click.BadParameter(f"{path}: malformed psi sidecar", param_hint="--psi") from exc


def _to_uint8(image: GrayImage) -> np.ndarray:
    return np.clip(np.rint(image.data * 255.0), 0, 255).astype(np.uint8)


__all__ = ["cli", "main", "run"]
