"""End-to-end command-line runs on a small simulated scene."""

from __future__ import annotations

from pathlib import Path

import pytest

from esai.cli.main import run
from esai.common.raster import read_f32_grid, read_pgm

SCENE = ["--set", "width=24", "--set", "height=16", "--set", "duration=0.15", "--set", "r_o=0.6",
         "--set", "slat_count=3"]
TRAIN = ["--set", "epochs=1", "--set", "intervals=4", "--set", "batch=1"]


def _ok(argv: list[str]) -> None:
    assert run(argv) == 0, argv


def _files(root: Path) -> dict[str, bytes]:
    return {str(path.relative_to(root)): path.read_bytes() for path in sorted(root.rglob("*")) if path.is_file()}


@pytest.fixture()
def sample_dir(tmp_path: Path) -> Path:
    out = tmp_path / "sample"
    _ok(["simulate", *SCENE, "--seed", "3", "--out", str(out)])
    return out


def test_refocus_accumulate_and_score(tmp_path: Path, sample_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
    refocused = tmp_path / "refocused.bin"
    image = tmp_path / "acc.pgm"

    _ok(["refocus", "--sample", str(sample_dir), "--psi", "auto", "--bounds", "0:200", "--out", str(refocused)])
    _ok(["acc", "--in", str(refocused), "--out", str(image)])
    capsys.readouterr()
    _ok(["eval", "--metric", "apse", "--sample", str(sample_dir), "--psi", f"{refocused}.psi"])

    line = capsys.readouterr().out.strip()
    assert line.startswith("apse=")
    assert float(line.split("=")[1]) <= 0.5
    assert read_pgm(image).shape == (16, 24)

    _ok(["eval", "--metric", "psnr", "--sample", str(sample_dir), "--image", str(image)])
    assert capsys.readouterr().out.startswith("psnr=")


def test_epi_outputs(tmp_path: Path, sample_dir: Path) -> None:
    f32 = tmp_path / "epi.f32"
    pgm = tmp_path / "epi.pgm"

    _ok(["epi", "--sample", str(sample_dir), "--row", "5", "--bins", "8", "--psi", "from-meta", "--out", str(f32)])
    _ok(["epi", "--sample", str(sample_dir), "--row", "5", "--bins", "8", "--mode", "signed", "--out", str(pgm)])

    assert read_f32_grid(f32).shape == (8, 24)
    assert read_pgm(pgm).shape == (8, 24)


def test_train_infer_sweep_report(tmp_path: Path, sample_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
    checkpoint = tmp_path / "model.esnn"
    recon = tmp_path / "recon.pgm"
    runs = tmp_path / "runs"
    report = tmp_path / "report.csv"

    _ok(["train", "--data", str(sample_dir), *TRAIN, "--out", str(checkpoint)])
    assert (tmp_path / "model.csv").read_text(encoding="utf-8").startswith("epoch,loss,psnr_val\n")
    _ok(["infer", "--sample", str(sample_dir), "--checkpoint", str(checkpoint), "--intervals-used", "2",
         "--out", str(recon)])
    assert read_pgm(recon).shape == (16, 24)

    _ok(["sweep", "--set", "width=16", "--set", "height=16", "--set", "duration=0.05", "--set", "slat_count=4",
         "--checkpoint", str(checkpoint), "--param", "r_o", "--values", "0.5,0.75", "--out", str(runs)])
    assert "r_o_01: r_o=0.75 Success" in capsys.readouterr().out
    _ok(["report", "--runs", str(runs), "--out", str(report)])

    assert len(report.read_text(encoding="utf-8").splitlines()) == 3
    assert read_pgm(tmp_path / "report.pgm").shape == (120, 400)


def test_infer_rejects_interval_count(tmp_path: Path, sample_dir: Path) -> None:
    checkpoint = tmp_path / "model.esnn"
    _ok(["train", "--data", str(sample_dir), "--set", "epochs=0", "--set", "intervals=4", "--out", str(checkpoint)])

    code = run(["infer", "--sample", str(sample_dir), "--checkpoint", str(checkpoint), "--intervals-used", "9",
                "--out", str(tmp_path / "r.pgm")])

    assert code == 1


def test_pipelines_are_byte_identical(tmp_path: Path) -> None:
    outputs = []
    for attempt in ("a", "b"):
        root = tmp_path / attempt
        sample = root / "sample"
        _ok(["simulate", *SCENE, "--seed", "5", "--out", str(sample)])
        _ok(["refocus", "--sample", str(sample), "--psi", "auto", "--bounds", "0:200",
             "--out", str(root / "refocused.bin")])
        _ok(["acc", "--in", str(root / "refocused.bin"), "--out", str(root / "acc.pgm")])
        _ok(["train", "--data", str(sample), *TRAIN, "--out", str(root / "model.esnn")])
        outputs.append(_files(root))

    assert outputs[0] == outputs[1]
