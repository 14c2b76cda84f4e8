"""Render all four figure kinds from a fresh primary-CLI run; refuse
aborted inputs.  Exercises plotkit strictly through the artifact files."""

import shutil
import subprocess
import sys

import pytest

from plotkit import AbortedInputError, FigureJob, KINDS, render
from plotkit.cli import main


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    """One fresh run of the primary CLI producing every input file."""
    out = tmp_path_factory.mktemp("artifacts")
    base = [sys.executable, "-m", "bouquet.cli"]
    common = ["--N", "1", "--m", "4", "--seed", "0", "--out", str(out)]
    for cmd in (["pressure", "--n-max", "6"], ["measure"],
                ["hairs", "--count", "9", "--depth", "30"]):
        subprocess.run(base + cmd + common, check=True, capture_output=True)
    return out


@pytest.mark.parametrize("kind", KINDS)
def test_renders_every_kind(artifacts, tmp_path, kind):
    out = tmp_path / f"{kind}.png"
    path = render(FigureJob(str(artifacts), kind, str(out)))
    assert out.exists()
    assert out.stat().st_size > 1000
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_cli_round_trip(artifacts, tmp_path, capsys):
    out = tmp_path / "fig.png"
    assert main(["pressure", "--in", str(artifacts),
                 "--out", str(out)]) == 0
    capsys.readouterr()
    assert out.exists()


def test_refuses_aborted_input(artifacts, tmp_path, capsys):
    bad = tmp_path / "bad"
    bad.mkdir()
    shutil.copy(artifacts / "pressure.csv", bad / "pressure.csv")
    with open(bad / "pressure.csv", "a") as fh:
        fh.write("#ABORTED state cap exceeded\n")
    with pytest.raises(AbortedInputError):
        render(FigureJob(str(bad), "pressure", str(tmp_path / "no.png")))
    assert main(["pressure", "--in", str(bad),
                 "--out", str(tmp_path / "no.png")]) == 1
    capsys.readouterr()
    assert not (tmp_path / "no.png").exists()


def test_missing_input_exits_1(tmp_path, capsys):
    assert main(["gibbs", "--in", str(tmp_path),
                 "--out", str(tmp_path / "no.png")]) == 1
    capsys.readouterr()


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError):
        FigureJob(str(tmp_path), "surface", "x.png")


def test_rendering_deterministic(artifacts, tmp_path):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    render(FigureJob(str(artifacts), "tightness", str(a)))
    render(FigureJob(str(artifacts), "tightness", str(b)))
    assert a.read_bytes() == b.read_bytes()
