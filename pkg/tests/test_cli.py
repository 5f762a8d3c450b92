import subprocess
import sys

import numpy as np
import pytest

from qcorral.cli import MANIFEST, REPORT, read_snapshot, run_cli
from qcorral.config import load_config

SMALL = """\
[domain]
radius = 5 nm
[carrier]
velocity = 5e-3 c
[initial]
amplitude = {amp}
[grid]
n_r = 16
n_theta = 32
[spectral]
max_order = 0
max_radial = 16
[run]
solver = {solver}
total_time = 2 fs
snapshots = 3
"""


def write_config(tmp_path, amp=1.0, solver="fdtd"):
    path = tmp_path / "small.conf"
    path.write_text(SMALL.format(amp=amp, solver=solver))
    return path


def test_params_output(capsys):
    assert run_cli(["params", "--electron", "--velocity", "5e-3c"]) == 0
    out = capsys.readouterr().out
    assert "51.52 as" in out
    assert "published value 160 as" in out and "DISCREPANCY" in out
    assert "0.07723 nm" in out and "within factor 2: yes" in out
    assert "V* = mv^2/8 = 1.59687 eV" in out


def test_params_custom_carrier(capsys):
    assert run_cli(["params", "--mass", "2 me", "--velocity", "1e-2 c", "--potential", "zero"]) == 0
    out = capsys.readouterr().out
    assert "6.44 as" in out
    assert "potential V              = 0 eV" in out


def test_params_bad_velocity(capsys):
    assert run_cli(["params", "--velocity", "2 c"]) == 1
    assert "error" in capsys.readouterr().err


def test_scenario_fig2_outputs(tmp_path, capsys):
    out = tmp_path / "fig2"
    code = run_cli(["scenario", "fig2", "--n-r", "16", "--n-theta", "32", "--output-dir", str(out)])
    assert code == 0
    files = sorted(p.name for p in out.iterdir())
    assert files == [f"fdtd_{i:03d}.csv" for i in range(12)] + [MANIFEST]
    cfg = load_config(out / MANIFEST)
    assert cfg.domain.radius == pytest.approx(5e-9)
    assert cfg.grid.n_r == 16
    table = read_snapshot(out / "fdtd_000.csv")
    assert table.shape == (16 * 32, 3)
    assert (out / "fdtd_000.csv").read_text().startswith("r,theta,value\n")
    manifest = (out / MANIFEST).read_text()
    for key in ("relaxation_time", "distortionless_potential", "dt", "cfl", "code_version"):
        assert f"# {key} = " in manifest


def test_run_determinism(tmp_path):
    cfg = write_config(tmp_path, solver="both")
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli(["run", str(cfg), "--output-dir", str(a)]) == 0
    assert run_cli(["run", str(cfg), "--output-dir", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert "spectral_002.csv" in names and "fdtd_002.csv" in names
    for name in names:
        if name == MANIFEST:
            continue
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_manifest_reparses_to_executed_config(tmp_path):
    cfg_path = write_config(tmp_path)
    out = tmp_path / "out"
    assert run_cli(["run", str(cfg_path), "--output-dir", str(out)]) == 0
    executed = load_config(cfg_path)
    from dataclasses import replace

    assert load_config(out / MANIFEST) == replace(executed, output_dir=str(out))


def test_spectral_and_fdtd_agree_roughly(tmp_path):
    out = tmp_path / "both"
    assert run_cli(["run", str(write_config(tmp_path, solver="both")), "--output-dir", str(out)]) == 0
    fd = read_snapshot(out / "fdtd_002.csv")
    sp = read_snapshot(out / "spectral_002.csv")
    np.testing.assert_array_equal(fd[:, :2], sp[:, :2])
    assert np.max(np.abs(fd[:, 2] - sp[:, 2])) < 0.1


def test_run_missing_file(tmp_path, capsys):
    assert run_cli(["run", str(tmp_path / "missing.conf")]) == 1
    assert "missing.conf" in capsys.readouterr().err


def test_run_bad_config(tmp_path, capsys):
    path = tmp_path / "bad.conf"
    path.write_text("[domain]\nradius = 5 nm\nwidth = 3\n[carrier]\nvelocity = 1e6\n")
    assert run_cli(["run", str(path)]) == 1
    assert "line 3" in capsys.readouterr().err


def test_divergence_exit_code(tmp_path, capsys):
    path = write_config(tmp_path, amp=1e308)
    assert run_cli(["run", str(path), "--output-dir", str(tmp_path / "o")]) == 2
    assert "diverged" in capsys.readouterr().err


def test_compare_report(tmp_path, capsys):
    out = tmp_path / "cmp"
    path = tmp_path / "cmp.conf"
    path.write_text(SMALL.format(amp=1.0, solver="fdtd").replace("16\nn_theta = 32", "32\nn_theta = 64"))
    assert run_cli(["compare", str(path), "--output-dir", str(out)]) == 0
    text = (out / REPORT).read_text()
    assert text == capsys.readouterr().out
    for key in ("8x16.t000", "16x32.t002", "32x64.t002", "order.linf.8->16", "order.l2.16->32", "final_linf"):
        assert key in text


def test_compare_needs_divisible_grid(tmp_path, capsys):
    path = tmp_path / "odd.conf"
    path.write_text(SMALL.format(amp=1.0, solver="fdtd").replace("n_r = 16", "n_r = 18"))
    assert run_cli(["compare", str(path)]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qcorral", "params"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "relaxation time" in proc.stdout
