"""Summaries of completed sweep runs: a CSV table and a PGM plot panel."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from skimage.draw import line, rectangle_perimeter

from esai.common.errors import RunReportError
from esai.common.raster import write_pgm
from esai.orchestrator.sweep import METRICS_FILENAME

LOGGER = logging.getLogger(__name__)

REPORT_COLUMNS = ("run", "r_o", "r_t", "psnr", "ssim", "psnr_acc", "ssim_acc")
PANEL_HEIGHT = 120
PANEL_WIDTH = 200
MARGIN = 10


@dataclass(frozen=True)
class RunMetrics:
    run: str
    r_o: float
    r_t: float
    psnr: float
    ssim: float
    psnr_acc: float
    ssim_acc: float


def collect_runs(run_dir: Path) -> list[RunMetrics]:
    """Read every run directory below ``run_dir``; incomplete runs are an error."""

    if not run_dir.is_dir():
        raise RunReportError(f"{run_dir}: run directory not found")
    candidates = sorted(path for path in run_dir.iterdir() if path.is_dir())
    if not candidates:
        raise RunReportError(f"{run_dir}: no completed runs found (0 runs)")
    rows: list[RunMetrics] = []
    missing: list[str] = []
    for directory in candidates:
        values = _read_metrics(directory / METRICS_FILENAME)
        if values is None or values.get("status") != "success":
            missing.append(directory.name)
            continue
        try:
            rows.append(
                RunMetrics(
                    run=values.get("run", directory.name),
                    **{key: float(values[key]) for key in REPORT_COLUMNS[1:]},
                )
            )
        except (KeyError, ValueError):
            missing.append(directory.name)
    if missing:
        raise RunReportError(f"{run_dir}: incomplete runs: {', '.join(missing)}")
    return rows


def write_report(rows: Sequence[RunMetrics], csv_path: Path, plot_path: Path | None = None) -> None:
    with csv_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            writer.writerow(
                (row.run, row.r_o, row.r_t, f"{row.psnr:.4f}", f"{row.ssim:.4f}",
                 f"{row.psnr_acc:.4f}", f"{row.ssim_acc:.4f}")
            )
    LOGGER.info("Wrote report of %d runs to %s", len(rows), csv_path)
    if plot_path is not None:
        write_pgm(plot_path, plot_panel(rows))


def plot_panel(rows: Sequence[RunMetrics]) -> np.ndarray:
    """Two side-by-side plots of PSNR versus r_o and versus r_t.

    The hybrid curve is drawn black, the accumulation curve mid-grey.
    """

    canvas = np.full((PANEL_HEIGHT, 2 * PANEL_WIDTH), 255, dtype=np.uint8)
    values = [value for row in rows for value in (row.psnr, row.psnr_acc) if math.isfinite(value)]
    low, high = (min(values), max(values)) if values else (0.0, 1.0)
    for panel, key in enumerate(("r_o", "r_t")):
        offset = panel * PANEL_WIDTH
        box_rows, box_cols = rectangle_perimeter(
            (MARGIN, offset + MARGIN),
            end=(PANEL_HEIGHT - MARGIN, offset + PANEL_WIDTH - MARGIN),
            shape=canvas.shape,
        )
        canvas[box_rows, box_cols] = 160
        ordered = sorted(rows, key=lambda row: getattr(row, key))
        xs = [getattr(row, key) for row in ordered]
        for metric, shade in (("psnr", 0), ("psnr_acc", 110)):
            points = [
                _to_pixel(x, getattr(row, metric), xs, (low, high), offset)
                for x, row in zip(xs, ordered)
            ]
            for (r0, c0), (r1, c1) in zip(points, points[1:]):
                line_rows, line_cols = line(r0, c0, r1, c1)
                canvas[line_rows, line_cols] = shade
            for r, c in points:
                canvas[max(r - 1, 0) : r + 2, max(c - 1, 0) : c + 2] = shade
    return canvas


def _to_pixel(
    x: float, y: float, xs: Sequence[float], y_range: tuple[float, float], offset: int
) -> tuple[int, int]:
    x_low, x_high = min(xs), max(xs)
    inner_width = PANEL_WIDTH - 4 * MARGIN
    inner_height = PANEL_HEIGHT - 4 * MARGIN
    fx = 0.5 if x_high <= x_low else (x - x_low) / (x_high - x_low)
    low, high = y_range
    fy = 0.5 if high <= low or not math.isfinite(y) else (y - low) / (high - low)
    column = offset + 2 * MARGIN + int(round(fx * inner_width))
    row = PANEL_HEIGHT - 2 * MARGIN - int(round(fy * inner_height))
    return row, column


def _read_metrics(path: Path) -> dict[str, str] | None:
    if not path.exists():
        return None
    values = {}
    for line_text in path.read_text(encoding="utf-8").splitlines():
        key, separator, value = line_text.partition("=")
        if separator:
            values[key.strip()] = value.strip()
    return values


__all__ = ["REPORT_COLUMNS", "RunMetrics", "collect_runs", "plot_panel", "write_report"]
