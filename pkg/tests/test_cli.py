import subprocess
import sys

import numpy as np
import pytest

from awtstat import cli, validation
from awtstat.errors import NumericError
from awtstat.fieldio import read_awtf


def run(argv):
    return cli.main([str(a) for a in argv])


def signal_csv(path, n=128, dt=0.5):
    t = dt * np.arange(n)
    y = np.cos(2 * np.pi * 0.2 * t)
    path.write_text("t,y\n" + "".join(f"{a:.17g},{b:.17g}\n" for a, b in zip(t, y)))
    return path


def data_rows(path):
    return [l for l in path.read_text().splitlines() if not l.startswith("#")]


def test_scalogram_outputs(tmp_path):
    sig = signal_csv(tmp_path / "s.csv")
    out = tmp_path / "o"
    assert run(["scalogram", "--signal", sig, "--out", out, "--scales", "log:1,8,6",
                "--format", "awtf,csv,pgm", "--ridge", "--seed", 4]) == 0
    W = read_awtf(out / "field.awtf")
    assert W.values.shape == (6, 128) and W.grid.dt == 0.5
    lines = (out / "field.csv").read_text().splitlines()
    assert any(l == "# seed=4" for l in lines) and any(l.startswith("# created=") for l in lines)
    assert data_rows(out / "field.csv")[0] == "t,s,re,im,mag,phase,run_id"
    assert data_rows(out / "ridge.csv")[0] == "t,s_f,boundary_flag,run_id"
    assert (out / "field.pgm").read_bytes().startswith(b"P5\n128 6\n255\n")


def test_reproducible_is_byte_identical(tmp_path):
    args = ["scalogram", "--signal", "zero", "--n-t", 64, "--fs", 1, "--noise-var", 1,
            "--scales", "log:2,8,4", "--format", "csv,awtf", "--seed", 7, "--reproducible"]
    assert run(args + ["--out", tmp_path / "a"]) == 0
    assert run(args + ["--out", tmp_path / "b"]) == 0
    for name in ("field.csv", "field.awtf"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert "created=" not in (tmp_path / "a" / "field.csv").read_text()
    assert run(args[:-3] + ["--seed", 8, "--reproducible", "--out", tmp_path / "c"]) == 0
    assert (tmp_path / "c" / "field.awtf").read_bytes() != (tmp_path / "a" / "field.awtf").read_bytes()


def test_contour_subcommand(tmp_path):
    sig = signal_csv(tmp_path / "s.csv")
    run(["scalogram", "--signal", sig, "--out", tmp_path, "--scales", "log:1,8,12", "--format", "awtf"])
    assert run(["contour", tmp_path / "field.awtf", "--quantiles", "0.5,0.9", "--out", tmp_path]) == 0
    rows = data_rows(tmp_path / "contours.csv")
    assert rows[0] == "polyline_id,vertex_id,t,s,level_id,level,run_id" and len(rows) > 1
    reg = data_rows(tmp_path / "regularity.csv")
    assert reg[0].startswith("level_id,level,n_polylines") and len(reg) == 3


def test_bounds_subcommand(tmp_path):
    assert run(["bounds", "--kind", "all", "--q", "4,16", "--eps", "0.1,1.6", "--out", tmp_path,
                "--seed", 5]) == 0
    text = (tmp_path / "bounds.csv").read_text()
    assert "# seed=5" in text
    rows = data_rows(tmp_path / "bounds.csv")
    assert rows[0] == "kind,eps,delta,q1,q2,bound,empirical,n,run_id"
    kinds = [r.split(",")[0] for r in rows[1:]]
    # eps = 1.6 is outside the phase and ridge domains
    assert kinds.count("magnitude") == 4 and kinds.count("phase") == 2 and kinds.count("ridge") == 2


@pytest.mark.parametrize("argv", [
    ["scalogram", "--signal", "zero", "--wavelet", "morse:b1=0.2"],
    ["scalogram", "--signal", "zero", "--wavelet", "wobble"],
    ["scalogram", "--signal", "zero", "--scales", "log:5,1,3"],
    ["scalogram", "--signal", "zero", "--format", "png"],
    ["scalogram", "--signal", "missing.csv"],
    ["contour", "missing.awtf"],
    ["validate", "pdf-joint", "--eps", "0.1"],
])
def test_input_errors_exit_2(tmp_path, argv, capsys):
    assert run(argv + ["--out", tmp_path]) == 2
    assert "input error" in capsys.readouterr().err


def test_bad_signal_csv_reports_line(tmp_path, capsys):
    p = tmp_path / "s.csv"
    p.write_text("t,y\n" + "".join(f"{i},{i}\n" for i in range(9)) + "9.5,1\n")
    assert run(["scalogram", "--signal", p, "--out", tmp_path]) == 2
    assert "s.csv:11" in capsys.readouterr().err


def _fake_report(passed):
    def driver(**kw):
        rep = validation.Report("pdf-mag", ("q", "ks"), [(4.0, 0.01)])
        rep.check("ks", passed, "ks 0.01")
        return rep
    return driver


@pytest.mark.parametrize("passed,code", [(True, 0), (False, 1)])
def test_validate_exit_codes(tmp_path, monkeypatch, capsys, passed, code):
    monkeypatch.setitem(validation.KINDS, "pdf-mag", _fake_report(passed))
    assert run(["validate", "pdf-mag", "--out", tmp_path, "--paths", 100]) == code
    assert ("PASS" if passed else "FAIL") + " ks" in capsys.readouterr().err
    assert data_rows(tmp_path / "validate-pdf-mag.csv")[0] == "q,ks,run_id"


def test_numeric_error_exit_3(tmp_path, monkeypatch):
    def boom(**kw):
        raise NumericError("did not converge", achieved=1.0)
    monkeypatch.setitem(validation.KINDS, "cov-mag", boom)
    assert run(["validate", "cov-mag", "--out", tmp_path]) == 3


def test_validate_pdf_phase_small_run(tmp_path):
    code = run(["validate", "pdf-phase", "--paths", 2000, "--q", "0,10", "--out", tmp_path, "--seed", 3])
    assert code in (0, 1)
    rows = data_rows(tmp_path / "validate-pdf-phase.csv")
    assert len(rows) >= 3


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "awtstat.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "scalogram" in res.stdout
    res = subprocess.run([sys.executable, "-m", "awtstat.cli", "nope"], capture_output=True, text=True)
    assert res.returncode == 2
