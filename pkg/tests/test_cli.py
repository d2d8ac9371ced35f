import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from elzaki_qm.cli import main, parse_range, parse_units


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_parse_helpers():
    assert parse_range("0..3") == [0, 1, 2, 3]
    assert parse_range("2") == [2]
    u = parse_units("hbar=2,M=0.5")
    assert (u.hbar, u.mass) == (2.0, 0.5)
    for bad in ("3..1", "a..b", ""):
        with pytest.raises(Exception):
            parse_range(bad)


def test_spectrum_coulomb(capsys):
    code, doc = run_json(capsys, "spectrum", "--potential", "coulomb", "--Z", "1", "--N", "3", "--l", "0", "--n", "0..3")
    assert code == 0 and doc["schema"] == 1
    energies = [row["E_closed"] for row in doc["rows"]]
    assert energies == pytest.approx([-0.5, -0.125, -1 / 18, -0.03125], rel=1e-14)


def test_spectrum_harmonic(capsys):
    code, doc = run_json(capsys, "spectrum", "--potential", "harmonic", "--omega", "1", "--N", "2", "--l", "1", "--n", "0..1")
    assert [row["E_closed"] for row in doc["rows"]] == [2.0, 4.0]


def test_spectrum_order(capsys):
    _, doc = run_json(capsys, "spectrum", "--potential", "coulomb", "--Z", "1", "--N", "2..3", "--l", "0..1", "--n", "0..1")
    keys = [(r["N"], r["l"], r["n"]) for r in doc["rows"]]
    assert keys == sorted(keys) and len(keys) == 8


def test_spectrum_verify_kratzer(capsys):
    code, doc = run_json(capsys, "spectrum", "--potential", "kratzer-fues", "--D0", "1", "--r0", "1", "--N", "3", "--l", "0", "--n", "0", "--verify")
    row = doc["rows"][0]
    assert code == 0 and row["passed"] is True
    assert abs(row["E_numeric"] - row["E_closed"]) <= 1e-6


def test_spectrum_error_rows(capsys):
    code, doc = run_json(capsys, "spectrum", "--potential", "coulomb", "--Z", "-1")
    assert code == 1
    assert doc["rows"][0]["E_closed"] is None and "NoBoundStateError" in doc["rows"][0]["error"]


def test_spectrum_partial_errors_exit_zero(capsys):
    # the inverse-square attraction is too strong only in two dimensions
    code, doc = run_json(capsys, "spectrum", "--potential", "mie", "--a", "-0.1", "--b", "-1", "--c", "0", "--N", "2..3")
    errors = ["error" in row for row in doc["rows"]]
    assert code == 0 and errors == [True, False]


def test_spectrum_units(capsys):
    _, doc = run_json(capsys, "spectrum", "--potential", "harmonic", "--omega", "1", "--units", "hbar=2,M=1")
    assert doc["rows"][0]["E_closed"] == 3.0
    assert doc["meta"]["hbar"] == 2.0


def test_wavefunction_coulomb(capsys):
    code, doc = run_json(capsys, "wavefunction", "--potential", "coulomb", "--Z", "1")
    assert code == 0
    assert doc["meta"]["normalization"] == pytest.approx(2.0, rel=1e-10)
    assert doc["meta"]["energy"] == -0.5
    first, last = doc["rows"][0], doc["rows"][-1]
    assert first["R"] == pytest.approx(2 * math.exp(-first["r"]), rel=1e-9)
    assert abs(last["R"]) < 1e-10


def test_wavefunction_harmonic_node(capsys):
    _, doc = run_json(capsys, "wavefunction", "--potential", "harmonic", "--omega", "1", "--n", "1")
    R = np.array([row["R"] for row in doc["rows"]])
    s = np.sign(R[np.abs(R) > 1e-12])
    assert int(np.count_nonzero(s[1:] != s[:-1])) == 1


def test_wavefunction_custom_grid(capsys):
    _, doc = run_json(capsys, "wavefunction", "--potential", "coulomb", "--Z", "1", "--grid", "0.1,10,500")
    assert len(doc["rows"]) == 500
    assert doc["rows"][0]["r"] == 0.1 and doc["rows"][-1]["r"] == 10.0


def test_transform_examples(capsys):
    assert run_json(capsys, "transform", "t^2")[1]["meta"]["image"] == "2*u^4"
    assert run_json(capsys, "transform", "exp(2t)*t")[1]["meta"]["image"] == "u^3/(1 - 2*u)^2"
    code, doc = run_json(capsys, "transform", "cos(3t)", "--at", "0.1")
    assert code == 0
    assert doc["meta"]["image"] == "u^2/(1 + 9*u^2)"
    row = doc["rows"][0]
    assert row["symbolic"] == pytest.approx(0.01 / 1.09, rel=1e-14)
    assert row["rel_diff"] <= 1e-10


def test_transform_growing_exponential(capsys):
    # the quadrature column must not overflow for images with a finite radius
    code, doc = run_json(capsys, "transform", "exp(2t)*t", "--at", "0.1,0.45")
    assert code == 0
    assert all(row["rel_diff"] <= 1e-10 for row in doc["rows"])


def test_transform_radius_meta(capsys):
    _, doc = run_json(capsys, "transform", "exp(2t)")
    assert doc["meta"]["convergence_radius"] == 0.5
    _, doc = run_json(capsys, "transform", "sin(t)")
    assert doc["meta"]["convergence_radius"] is None


def test_transform_parse_error(capsys):
    code, out, err = run(capsys, "transform", "t^-2")
    assert code == 2
    assert "position 1" in err and "^" in err


def test_transform_outside_region(capsys):
    code, _, err = run(capsys, "transform", "exp(2t)", "--at", "0.7")
    assert code == 2 and "convergence radius" in err


def test_verify_default_passes(capsys):
    code, doc = run_json(capsys, "verify")
    assert code == 0
    assert doc["meta"]["failed"] == 0
    assert {row["suite"] for row in doc["rows"]} == {"transforms", "mde", "spectrum", "nodes", "orthogonality", "appendix"}
    assert all({"measured", "tolerance", "passed"} <= row.keys() for row in doc["rows"])


def test_verify_tight_tolerance_fails(capsys):
    code, doc = run_json(capsys, "verify", "--potential", "coulomb", "--tolerance", "1e-12", "--suite", "spectrum")
    assert code == 1
    assert doc["meta"]["failed"] > 0


def test_verify_suite_filter(capsys):
    code, doc = run_json(capsys, "verify", "--suite", "transforms")
    assert code == 0
    assert {row["suite"] for row in doc["rows"]} == {"transforms"}


def test_verify_unknown_suite(capsys):
    code, _, _ = run(capsys, "verify", "--suite", "bogus")
    assert code == 2


def test_appendix_examples(capsys):
    _, doc = run_json(capsys, "appendix", "shm", "--omega", "2", "--y0", "1", "--yp0", "0")
    assert doc["meta"]["solution"] == "cos(2*x)"
    _, doc = run_json(capsys, "appendix", "bessel", "--a", "1")
    assert doc["meta"]["solution"] == "J0(x)"
    at = {row["x"]: row["residual"] for row in doc["rows"]}
    assert at[0.7] < 1e-8
    _, doc = run_json(capsys, "appendix", "shift", "--a", "1", "--f", "t")
    assert doc["meta"]["shifted_image"] == "u^3/(1 + u)^2"


def test_appendix_well_levels(capsys):
    _, doc = run_json(capsys, "appendix", "shm", "--width", "2", "--levels", "2")
    levels = doc["meta"]["well_levels"]
    assert levels[1]["E"] == pytest.approx(math.pi**2 / 2)


def test_usage_errors(capsys):
    assert run(capsys, "spectrum", "--potential", "coulomb", "--Z", "1", "--n", "3..1")[0] == 2
    assert run(capsys, "spectrum", "--potential", "coulomb")[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_csv_format(capsys):
    code, out, _ = run(capsys, "spectrum", "--potential", "coulomb", "--Z", "1", "--n", "0..1", "--format", "csv")
    lines = out.splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    assert "# schema=1" in meta
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    assert [float(r["E_closed"]) for r in rows] == [-0.5, -0.125]


def test_env_default_format(capsys, monkeypatch):
    monkeypatch.setenv("ELZAKI_QM_DEFAULT_FORMAT", "csv")
    _, out, _ = run(capsys, "transform", "t")
    assert out.startswith("# schema=1")


def test_out_file(capsys, tmp_path):
    path = tmp_path / "spec.json"
    code, out, _ = run(capsys, "spectrum", "--potential", "coulomb", "--Z", "1", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["rows"][0]["E_closed"] == -0.5


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--potential", "pseudoharmonic", "--De", "1", "--re", "1", "--n", "0..2", "--verify"],
        ["verify", "--suite", "transforms,appendix"],
        ["wavefunction", "--potential", "harmonic", "--omega", "1", "--n", "2", "--format", "csv"],
    ],
)
def test_deterministic_output(capsys, argv):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "elzaki_qm", "transform", "t^2"], capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["meta"]["image"] == "2*u^4"
