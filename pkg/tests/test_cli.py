import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from barcode_tv.cli import load_image, meta_path, run, save_image
from barcode_tv.experiments import METRIC_COLUMNS
from barcode_tv.grid import GridImage, read_pgm
from barcode_tv.restore import SWEEP_COLUMNS


@pytest.fixture
def code_file(tmp_path):
    out = tmp_path / "code.pgm"
    assert run(["generate", "--modules", "3x3", "--ppm", "4", "--seed", "2", str(out)]) == 0
    return out


def _kv(path):
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["key", "value"]
    return dict(rows[1:])


def test_generate_writes_meta(code_file):
    img = load_image(code_file)
    assert img.shape == (20, 20)
    assert set(np.unique(img.values)) <= {0.0, 1.0}
    meta = dict(line.split("=") for line in meta_path(code_file).read_text().split())
    assert int(meta["omega_pixels"]) >= 4 and meta["seed"] == "2"


def test_pgm_convention(code_file):
    # black (0) on disk is foreground 1 in memory
    raw = read_pgm(code_file.read_bytes())
    assert np.array_equal(load_image(code_file).values, 1 - raw.values)


def test_degrade_appends_meta(code_file, tmp_path):
    out = tmp_path / "noisy.pgm"
    assert run(["degrade", "--blur-radius", "2", "--noise", "0.1", "--seed", "3", str(code_file), str(out)]) == 0
    lines = meta_path(out).read_text().splitlines()
    assert lines[0].startswith("omega_pixels=")
    assert "blur_radius=2" in lines and "noise=0.1" in lines and "noise_seed=3" in lines
    assert any(line.startswith("snr_db=") for line in lines)


def test_restore_report(code_file, tmp_path, capsys):
    out, rep, bino = tmp_path / "r.pgm", tmp_path / "r.csv", tmp_path / "b.pgm"
    argv = ["restore", "--method", "f1", "--lambda-bar", "2", "--reference", str(code_file)]
    argv += ["--report", str(rep), "--binary-output", str(bino), str(code_file), str(out)]
    assert run(argv) == 0
    kv = _kv(rep)
    assert kv["method"] == "f1" and kv["status"] == "optimal"
    assert float(kv["pixel_error"]) == 0
    assert np.array_equal(load_image(bino).values, load_image(code_file).values)
    assert "objective=" in capsys.readouterr().out


def test_evaluate(code_file, capsys):
    assert run(["evaluate", "--functional", "f1", "--lambda-bar", "1", str(code_file), str(code_file)]) == 0
    out = capsys.readouterr().out.splitlines()
    value = float(out[0].split("=")[1])
    assert out[1] == "tv,fidelity"
    tv, fid = (float(t) for t in out[2].split(","))
    assert fid == 0 and tv == value > 0


def test_certify_exit_codes(code_file, tmp_path, capsys):
    assert run(["certify", "--lambda-bar", "1", str(code_file)]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["key", "value"]
    assert run(["certify", "--lambda-bar", "0.01", str(code_file)]) == 1
    blank = tmp_path / "blank.pgm"
    save_image(blank, GridImage(np.zeros((8, 8))))
    assert run(["certify", "--lambda-bar", "1", str(blank)]) == 1


def test_sweep(code_file, tmp_path):
    rep = tmp_path / "s.csv"
    argv = ["sweep", "--method", "f1", "--lambdas", "0.01,2", "--report", str(rep)]
    assert run(argv + ["--out-dir", str(tmp_path / "s"), str(code_file)]) == 0
    rows = list(csv.reader(open(rep)))
    assert tuple(rows[0]) == SWEEP_COLUMNS and len(rows) == 3
    assert (tmp_path / "s" / "f1_lam2.pgm").exists()


def test_oracle_check(capsys):
    assert run(["oracle-check", "--trials", "3", "--max-pixels", "9"]) == 0
    assert "failures=0" in capsys.readouterr().out
    assert run(["oracle-check", "--max-pixels", "2"]) == 2


def test_selftest():
    assert run(["selftest"]) == 0


def test_usage_errors(code_file, capsys):
    assert run(["restore", "--bogus", str(code_file), "x.pgm"]) == 2
    assert run(["generate", "--modules", "3by3", "x.pgm"]) == 2
    assert run([]) == 2


def test_io_failure(tmp_path):
    assert run(["restore", "--method", "f1", "--lambda-bar", "1", str(tmp_path / "missing.pgm"), "o.pgm"]) == 1
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P7 junk")
    assert run(["certify", "--lambda-bar", "1", str(bad)]) == 1


def test_experiment_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["experiment", "fig4a", "--out", str(a)]) == 0
    assert run(["experiment", "fig4a", "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert "metrics.csv" in names and names == sorted(p.name for p in b.iterdir())
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    header = (a / "metrics.csv").read_text().splitlines()[0]
    assert tuple(header.split(",")) == METRIC_COLUMNS


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "barcode_tv.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()


def test_fig4_script(tmp_path):
    from pathlib import Path

    script = Path(__file__).parent.parent / "scripts" / "fig4.py"
    proc = subprocess.run(
        [sys.executable, str(script), "--out", str(tmp_path)], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "fig4a" / "metrics.csv").exists()
    assert "fig4b" in proc.stdout
