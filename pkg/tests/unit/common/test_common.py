from __future__ import annotations

import math

import pytest

from esai.common import threads
from esai.common.errors import (
    ConfigError,
    DataError,
    EsaiError,
    InvalidArgumentError,
    ResolutionError,
    TrainingDivergedError,
)
from esai.common.formatting import format_duration, format_metric, format_psi, humanize_status


@pytest.mark.parametrize(
    ("seconds", "expected"),
    [(None, "-"), (-1.0, "-"), (5.25, "5.2s"), (65.0, "1m 05s"), (3723.0, "1h 02m 03s")],
)
def test_format_duration(seconds: float | None, expected: str) -> None:
    assert format_duration(seconds) == expected


def test_format_metric_and_psi() -> None:
    assert format_metric(21.123456) == "21.1235"
    assert format_metric(0.5, digits=2) == "0.50"
    assert format_metric(None) == "-"
    assert format_metric(math.nan) == "-"
    assert format_psi((47.3, 0.0)) == "(47.300, 0.000) px/s"


@pytest.mark.parametrize(
    ("status", "expected"),
    [("success", "Success"), ("failure", "Failure"), ("not_run", "Not Run"), (None, "Unknown")],
)
def test_humanize_status(status: str | None, expected: str) -> None:
    assert humanize_status(status) == expected


def test_exit_codes_follow_the_error_family() -> None:
    assert ConfigError("x").exit_code == 2
    assert isinstance(ConfigError("x"), DataError)
    assert TrainingDivergedError(4, math.nan).exit_code == 3
    assert not issubclass(InvalidArgumentError, EsaiError)


def test_error_messages() -> None:
    error = ResolutionError(7, 40, 2, (32, 24))

    assert str(error) == "event 7 at (x=40, y=2) outside resolution 32x24"
    assert (error.index, error.x, error.y) == (7, 40, 2)
    assert str(TrainingDivergedError(3, math.inf)).startswith("training diverged at epoch 3")


@pytest.mark.parametrize(("raw", "expected"), [("4", 4), ("", 0), ("-2", 0), ("many", 0)])
def test_configured_threads(monkeypatch: pytest.MonkeyPatch, raw: str, expected: int) -> None:
    monkeypatch.setenv(threads.THREADS_ENV_VAR, raw)

    assert threads.configured_threads() == expected


def test_apply_thread_limit(monkeypatch: pytest.MonkeyPatch) -> None:
    calls: list[int] = []
    monkeypatch.setattr(threads.torch, "set_num_threads", calls.append)

    monkeypatch.delenv(threads.THREADS_ENV_VAR, raising=False)
    assert threads.apply_thread_limit() == 0
    monkeypatch.setenv(threads.THREADS_ENV_VAR, "2")
    assert threads.apply_thread_limit() == 2

    assert calls == [2]
