import json
import subprocess
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data" / "scenarios"


def _reeb_rigidity(*args):
    return subprocess.run(
        ["reeb_rigidity", *[str(arg) for arg in args]],
        capture_output=True,
        text=True,
        check=False,
    )


def test_reeb_rigidity_help():
    result = _reeb_rigidity("--help")
    assert "usage: reeb_rigidity" in result.stdout
    assert result.returncode == 0

    result = _reeb_rigidity("run", "--help")
    assert "--seed-grid" in result.stdout
    assert result.returncode == 0


def test_reeb_rigidity_fields():
    result = _reeb_rigidity("fields")
    assert result.returncode == 0
    assert "[scenario] command (string, required): spectrum, constellation, certify, profile, plug" in result.stdout
    assert "[profile] kappa (float, default 0.0)" in result.stdout


def test_inline_scenario():
    result = _reeb_rigidity("spectrum", "model.kind=Sphere", "model.n=2", "--cap", "7")
    assert result.returncode == 0
    report = json.loads(result.stdout)
    assert report["status"] == 0
    assert len(report["report"]["entries"]) == 2

    result = _reeb_rigidity("spectrum", "model.kind")
    assert result.returncode == 2
    assert "section.key=value" in result.stderr


def test_run_scenario_files(tmp_path):
    result = _reeb_rigidity("run", DATA / "torus_persist.scenario", "--out", tmp_path)
    assert result.returncode == 0, result.stderr
    assert "torus_persist: status 0" in result.stdout
    report = json.loads((tmp_path / "torus_persist.json").read_text())
    assert report["report"]["theorem"] == "T3"
    assert report["report"]["count"] == 4

    result = _reeb_rigidity("run", DATA / "katok_pinched.scenario", "--out", tmp_path)
    assert result.returncode == 1

    result = _reeb_rigidity("run", DATA / "malformed_class.scenario", "--out", tmp_path)
    assert result.returncode == 2
    assert "Malformed homotopy class" in result.stderr
    assert not (tmp_path / "malformed_class.json").exists()

    result = _reeb_rigidity("run", tmp_path / "missing.scenario")
    assert result.returncode == 2


@pytest.mark.slow
def test_run_scenario_directory(tmp_path):
    result = _reeb_rigidity("run", DATA, "--out", tmp_path)
    # the malformed scenario decides the exit status of the batch
    assert result.returncode == 2
    written = sorted(p.name for p in tmp_path.iterdir())
    assert written == ["fast-plug.json", "katok_pinched.json", "sphere_ellipsoid.json", "torus_persist.json"]
    plug = json.loads((tmp_path / "fast-plug.json").read_text())
    assert plug["status"] == 0
    assert plug["report"]["epsilon"] == 0.05
    assert plug["report"]["delta"] == 0.01
