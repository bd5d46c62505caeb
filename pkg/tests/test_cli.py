import csv
import io
import json
import subprocess
import sys

import pytest

from massless_oscillator import __version__
from massless_oscillator.cli import run

REF_ORBIT = ["--x0", "0.479", "0", "--p0", "0", "1.290805"]


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_json_schema():
    code, out, _ = call("spectrum", "--levels", "5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"meta", "data"}
    meta = doc["meta"]
    assert meta["command"] == "spectrum"
    assert meta["params"] == {"c": 1.0, "kappa2": 1.0, "hbar": 1.0}
    assert meta["version"] == {"schema": "1", "package": __version__}
    assert "rel_tol" in meta["tolerances"]
    assert [d["n"] for d in doc["data"]] == [1, 2, 3, 4, 5]
    assert doc["data"][0]["E_n"] == pytest.approx(1.8557570814892383, rel=1e-15)


def test_csv_formatting():
    code, out, _ = call("spectrum", "--levels", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,a_n,E_n,r_max"
    assert lines[1].split(",")[1] == format(-2.338107410459767, ".17g")
    assert "\r" not in out


def test_orbit_columns_and_conservation():
    code, out, _ = call("orbit", *REF_ORBIT, "--periods", "3", "--samples", "301")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["t", "x1", "x2", "p1", "p2", "r", "p_norm", "E_drift", "J_drift"]
    assert len(table) == 301
    assert max(abs(float(r["E_drift"])) for r in table) < 1e-8
    r = [float(row["r"]) for row in table]
    assert min(r) >= 0.479 - 1e-6 and max(r) <= 1.38499 + 1e-5


def test_orbit_json_diagnostics():
    code, out, _ = call("orbit", *REF_ORBIT, "--t-end", "5", "--samples", "11", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["meta"]["diagnostics"]["E_drift"] < 1e-8


def test_segment_unit_rmax():
    code, out, _ = call("segment", "--rmax", "1", "--samples", "5")
    assert code == 0
    assert out.splitlines()[1:] == ["0,-1,0", "1,0,0.5", "2,1,0", "3,0,0.5", "4,-1,0"]


def test_classify_apsidal_trajectory():
    code, out, _ = call("classify", *REF_ORBIT)
    assert code == 0 and rows(out)[0]["motion"] == "annulus"
    code, out, _ = call("apsidal", *REF_ORBIT)
    row = rows(out)[0]
    assert abs(float(row["delta_phi"]) - float(row["delta_phi_quadrature"])) < 1e-8
    assert int(row["n"]) <= 64
    code, out, _ = call("trajectory", "--E", "1.4055255", "--J", "0.618295595", "--points", "11")
    t = rows(out)
    assert code == 0 and len(t) == 11 and float(t[0]["phi"]) == 0.0
    assert float(t[-1]["phi"]) == pytest.approx(float(row["delta_phi"]), abs=1e-8)


def test_wavefunction_and_density_and_virial():
    code, out, _ = call("wavefunction", "--n", "2", "--points", "50", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and len(doc["data"]) == 50 and doc["meta"]["normalization_defect"] < 1e-6
    code, out, _ = call("wavefunction", "--space", "momentum", "--points", "20")
    assert code == 0 and rows(out)[0]["k"] == "0"
    code, out, _ = call("density-compare", "--n", "1", "2")
    assert code == 0 and [r["n"] for r in rows(out)] == ["1", "2"]
    code, out, _ = call("density-compare", "--n", "1", "--profile")
    assert code == 0 and len(rows(out)) == 400
    code, out, _ = call("virial", "--levels", "2")
    assert code == 0
    assert float(rows(out)[0]["kinetic_over_E"]) == pytest.approx(2 / 3, abs=1e-8)


def test_natural_and_units():
    code, out, _ = call("spectrum", "--levels", "1", "--natural")
    assert code == 0
    code2, out2, _ = call("spectrum", "--levels", "1", "--c", "2", "--kappa2", "4", "--hbar", "0.5")
    e1 = float(rows(out)[0]["E_n"])
    e2 = float(rows(out2)[0]["E_n"])
    assert e2 == pytest.approx(e1 * (2 * 2 * 0.5) ** (2 / 3), rel=1e-14)


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["spectrum", "--wat"],
        ["spectrum", "--levels", "0"],
        ["spectrum", "--natural", "--c", "2"],
        ["spectrum", "--tol", "2"],
        ["spectrum", "--c", "-1"],
        ["orbit", "--x0", "1", "0", "--p0", "1", "0"],
        ["classify", "--E", "1", "--J", "5"],
        ["classify", "--E", "1"],
        ["classify", "--x0", "1", "0"],
        ["apsidal", "--E", "1", "--J", "0"],
        ["wavefunction", "--n", "0"],
        ["segment", "--rmax", "-1"],
        ["segment", "--samples", "1"],
        ["segment", "--gnuplot"],
    ],
)
def test_input_errors_exit_2(argv, capsys):
    code, out, err = call(*argv)
    assert code == 2
    assert out == ""
    assert err or capsys.readouterr().err


def test_nonconvergence_exit_3():
    code, out, err = call("orbit", *REF_ORBIT, "--tol", "1e-30", "--samples", "3")
    assert code == 3 and out == "" and "numerical" in err


def test_output_file_and_gnuplot(tmp_path):
    target = tmp_path / "orbit.csv"
    code, out, _ = call("orbit", *REF_ORBIT, "--samples", "21", "--output", str(target), "--gnuplot")
    assert code == 0 and out == ""
    script = tmp_path / "orbit.csv.gp"
    assert target.read_text().startswith("t,x1")
    assert "orbit.csv" in script.read_text() and "using 2:3" in script.read_text()


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_byte_determinism(tmp_path, fmt):
    a, b = tmp_path / f"a.{fmt}", tmp_path / f"b.{fmt}"
    for path in (a, b):
        assert call("orbit", *REF_ORBIT, "--periods", "2", "--samples", "101", "--format", fmt, "--output", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "massless_oscillator", "spectrum", "--levels", "1"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout.startswith("n,a_n")
    proc = subprocess.run([sys.executable, "-m", "massless_oscillator", "nope"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr
