import json

import numpy as np
import pytest

from triangle_cyclicity import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_oval_example(capsys):
    code, out, _ = run(["oval", "--h", "-2"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == "1" and doc["command"] == "oval"
    ov = doc["result"]["ovals"][0]
    assert ov["x1"] == pytest.approx(2 - np.sqrt(3), abs=1e-12)
    assert ov["x2"] == pytest.approx(2.0, abs=1e-12)


def test_count_zeros_example(capsys):
    code, out, _ = run(["count-zeros", "--greek", "0,-144,0,0"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["count"] <= 3
    assert doc["result"]["params"]["mu"] == [1.0, 0.0, 0.0, 0.0]


def test_poly_verify_example(capsys):
    code, out, _ = run(["poly-verify"], capsys)
    assert code == 0
    ids = json.loads(out)["result"]["identities"]
    assert ids and all(r["status"] == "exact-match" for r in ids)


def test_csv_grid(capsys):
    code, out, _ = run(["integrals", "--grid", "-3", "-1", "3", "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "h,Istar,I2,I0,dIstar,dI2,dI0"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[0] == "-3.00000000000000000e+00"
    assert all("e" in c for c in first)


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["nosuch"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["oval", "--h", "abc"])
    assert exc.value.code == 2
    assert run(["oval", "--h", "0.5"], capsys)[0] == 2
    assert run(["oval"], capsys)[0] == 2
    assert run(["count-zeros", "--greek", "1,2"], capsys)[0] == 2
    assert run(["count-zeros", "--greek", "1,2,3,4", "--mu", "1,2,3,4"], capsys)[0] == 2
    assert run(["acceptance", "--only", "C9"], capsys)[0] == 2
    assert run(["count-zeros", "--greek", "1,0,0,0", "--format", "csv"], capsys)[0] == 0


def test_report_requires_artifacts(capsys, tmp_path):
    code, _, err = run(["report"], capsys)
    assert code == 2 and "artifact" in err
    assert run(["report", str(tmp_path / "missing.json")], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema_version": "0"}))
    assert run(["report", str(bad)], capsys)[0] == 2


def test_out_dir_and_report(capsys, tmp_path):
    code, out, _ = run(["acceptance", "--only", "C1", "--out-dir", str(tmp_path)], capsys)
    assert code == 0 and out.strip().endswith("acceptance.json")
    code, out, _ = run(["scan", "--samples", "60", "--seed", "3", "--jobs", "1", "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    code, out, _ = run(["report", str(tmp_path / "acceptance.json"), str(tmp_path / "scan.json")], capsys)
    assert code == 0
    doc = json.loads(out)
    keys = [c["key"] for c in doc["result"]["checks"]]
    assert keys == ["C1", "scan"]
    assert all(c["anchor"] for c in doc["result"]["checks"])
    assert "kappa1_gamma_mid_f0_neg" in doc["result"]["checks"][1]["limits"]


def test_scan_output_is_deterministic(capsys):
    argv = ["scan", "--samples", "120", "--seed", "11"]
    a = run(argv + ["--jobs", "1"], capsys)[1]
    b = run(argv + ["--jobs", "2"], capsys)[1]
    assert a == b


def test_acceptance_records_are_deterministic(capsys):
    a = run(["acceptance", "--only", "C1,C2"], capsys)
    b = run(["acceptance", "--only", "C1,C2"], capsys)
    assert a[1] == b[1]
    assert "[PASS] C1" in a[2]


def test_env_tolerance_override(capsys, monkeypatch):
    monkeypatch.setenv("TRIANGLE_TOL_PF_RESIDUAL", "1e-30")
    code, out, _ = run(["pf-check", "--n", "10"], capsys)
    assert code == 1
    assert json.loads(out)["status"] == "fail"
    monkeypatch.setenv("TRIANGLE_TOL_PF_RESIDUAL", "-1")
    assert run(["pf-check", "--n", "10"], capsys)[0] == 2


def test_simulate_and_orbit_dump(capsys, tmp_path):
    orbit = tmp_path / "orbit.csv"
    code, out, _ = run(["simulate", "--eps", "1e-3,0,0,0,0", "--n-section", "5", "--orbit-csv", str(orbit)], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["count"] == 0
    assert doc["result"]["mu"] == [-1e-3, 0.0, 0.0, 0.0]
    assert orbit.read_text().startswith("t,x,y,H")


def test_find_three_and_ect(capsys):
    code, out, _ = run(["find-three"], capsys)
    assert code == 0
    assert len(json.loads(out)["result"]["zeros"]) == 3
    code, out, _ = run(["ect", "--h", "-3", "-1"], capsys)
    assert code == 0
    pts = json.loads(out)["result"]["points"]
    assert all(d < 0 for p in pts for d in p["deltas"])
