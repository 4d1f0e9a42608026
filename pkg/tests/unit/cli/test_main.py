from __future__ import annotations

from pathlib import Path

import pytest
from click.testing import CliRunner

from esai.cli.main import cli, run


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()


def test_help_lists_commands(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["--help"])

    assert result.exit_code == 0
    for command in ("simulate", "refocus", "epi", "acc", "train", "infer", "eval", "sweep", "report"):
        assert command in result.output


def test_unknown_flag_is_a_usage_error(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["simulate", "--bogus"]) == 1
    assert "No such option" in capsys.readouterr().err


def test_missing_required_option(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["acc"]) == 1
    assert "--in" in capsys.readouterr().err


def test_unknown_scene_key_is_a_data_error(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["simulate", "--set", "colour=red", "--out", str(tmp_path / "sample")]) == 2
    assert "unknown keys: colour" in capsys.readouterr().err


def test_report_on_empty_directory(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    runs = tmp_path / "runs"
    runs.mkdir()

    assert run(["report", "--runs", str(runs), "--out", str(tmp_path / "report.csv")]) == 2
    assert "(0 runs)" in capsys.readouterr().err


def test_report_on_missing_directory(tmp_path: Path) -> None:
    assert run(["report", "--runs", str(tmp_path / "absent"), "--out", str(tmp_path / "r.csv")]) == 2


def test_refocus_needs_exactly_one_input(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    events = tmp_path / "events.csv"
    events.write_text("t,x,y,p\n0,1,1,1\n", encoding="utf-8")

    assert run(["refocus", "--out", str(tmp_path / "out.bin")]) == 1
    assert "exactly one of --sample and --in" in capsys.readouterr().err


@pytest.mark.parametrize("bounds", ["200:0", "7", "a:b"])
def test_bad_search_bounds(tmp_path: Path, bounds: str) -> None:
    events = tmp_path / "events.csv"
    events.write_text("t,x,y,p\n0,1,1,1\n10,2,1,-1\n", encoding="utf-8")

    code = run(
        ["refocus", "--in", str(events), "--bounds", bounds, "--out", str(tmp_path / "out.bin")]
    )

    assert code == 1


def test_bad_psi_literal(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    events = tmp_path / "events.csv"
    events.write_text("t,x,y,p\n0,1,1,1\n10,2,1,-1\n", encoding="utf-8")

    code = run(["refocus", "--in", str(events), "--psi", "fast", "--out", str(tmp_path / "o.bin")])

    assert code == 1
    assert "--psi" in capsys.readouterr().err


def test_refocus_event_file_with_literal_psi(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    events = tmp_path / "events.csv"
    events.write_text("t,x,y,p\n0,1,1,1\n100000,7,1,-1\n", encoding="utf-8")
    out = tmp_path / "refocused.bin"

    code = run(
        ["refocus", "--in", str(events), "--resolution", "8x2", "--psi", "20,0", "--out", str(out)]
    )

    assert code == 0
    assert out.exists()
    assert (tmp_path / "refocused.bin.psi").read_text(encoding="utf-8") == (
        "psi_x=20.0\npsi_y=0.0\nt_ref=50000\n"
    )
    assert "1 left the frame" in capsys.readouterr().out


def test_eval_apse_needs_estimate(tmp_path: Path) -> None:
    assert run(["eval", "--metric", "apse"]) == 1
