"""Sweep execution and reporting."""

from .report import REPORT_COLUMNS, RunMetrics, collect_runs, plot_panel, write_report
from .sweep import SWEEP_PARAMETERS, SweepOrchestrator, SweepRun, scene_for, search_params

__all__ = [
    "REPORT_COLUMNS",
    "RunMetrics",
    "SWEEP_PARAMETERS",
    "SweepOrchestrator",
    "SweepRun",
    "collect_runs",
    "plot_panel",
    "scene_for",
    "search_params",
    "write_report",
]
