import json
import subprocess
import sys
from functools import partial

import numpy as np
import pytest

from test_falsifier import negated_evaluate
from wyskew import cli
from wyskew.falsifier import audit_theorems
from wyskew.linalg import SIGMA_X, SIGMA_Y, SIGMA_Z
from wyskew.matrixio import read_matrix, write_matrix
from wyskew.states import validate


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, m in {
        "state": np.diag([0.9, 0.1]),
        "bad_trace": np.diag([0.9, 0.2]),
        "bad_psd": np.diag([1.1, -0.1]),
        "bad_herm": np.array([[0.5, 0.3], [0.0, 0.5]]),
        "sx": SIGMA_X,
        "sy": SIGMA_Y,
        "sz": SIGMA_Z,
        "big": np.eye(3),
    }.items():
        p = tmp_path / f"{name}.json"
        write_matrix(p, m)
        paths[name] = p
    (tmp_path / "junk.json").write_text("{ nope")
    paths["junk"] = tmp_path / "junk.json"
    return paths


def test_scan_pauli_csv(tmp_path):
    out = tmp_path / "scan.csv"
    assert run("scan-pauli", "--grid", 181, "--out", out) == 0
    lines = out.read_text().split("\n")
    assert lines[0] == "theta,sum_skew,lb_nsk1,lb_snsk2,lb_combined,snsk2_applicable"
    assert lines[-1] == ""
    assert len(lines[1:-1]) == 181
    # pi/4 is not on the 2-degree grid; a grid of 9 steps by exactly pi/4
    assert run("scan-pauli", "--grid", 9, "--out", out) == 0
    rows = [ln.split(",") for ln in out.read_text().splitlines()[1:]]
    by_theta = {k: rows[k] for k in range(9)}
    q = by_theta[1]
    assert float(q[1]) == pytest.approx(1.0, abs=1e-10)
    assert float(q[2]) == pytest.approx(0.75, abs=1e-10)
    assert float(q[3]) == pytest.approx(0.25, abs=1e-10)
    for k in (0, 2):
        assert by_theta[k][3] == "" and by_theta[k][5] == "false"
    assert "e" in rows[1][1] and len(rows[1][1].split("e")[0].replace(".", "").lstrip("-")) == 17


def test_scan_pauli_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("scan-pauli", "--out", a) == 0
    assert run("scan-pauli", "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_scan_pauli_json(capsys):
    assert run("scan-pauli", "--grid", 3, "--format", "json") == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 3 and rows[0]["lb_snsk2"] is None


def test_scan_pauli_unwritable(tmp_path, capsys):
    assert run("scan-pauli", "--out", tmp_path / "missing" / "x.csv") == 1
    assert run("scan-pauli", "--grid", 1) == 1


def test_evaluate(files, capsys):
    assert run("evaluate", files["state"], files["sx"], files["sy"], files["sz"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["lhs_sum_skew"] == pytest.approx(0.8, abs=1e-12)
    for k in ("SUM_SQRT", "NSK1", "NSK2", "COMBINED"):
        assert rep["bounds"][k]["applicable"]
    # sigma_z commutes with the diagonal state so the Gram bound is out
    assert not rep["bounds"]["SNSK2"]["applicable"]
    assert "A_3" in rep["bounds"]["SNSK2"]["reason"]


def test_evaluate_single_and_family(files, capsys):
    assert run("evaluate", files["state"], files["sx"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert [k for k, e in rep["bounds"].items() if e["applicable"]] == ["SUM_SQRT"]
    assert rep["bounds"]["SUM_SQRT"]["slack"] == pytest.approx(0.0, abs=1e-12)
    assert run("evaluate", files["state"], files["sx"], files["sy"],
               "--conj-a", files["sx"], "--conj-b", files["sy"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["bounds"]["RUXP"]["value"] == pytest.approx(0.64, abs=1e-12)
    # C = sigma_z is off by a factor 2 from -i[sx, sy]
    assert run("evaluate", files["state"], files["sx"],
               "--conj-a", files["sx"], "--conj-b", files["sy"], "--conj-c", files["sz"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert not rep["bounds"]["RUXP"]["applicable"] and "residual" in rep["bounds"]["RUXP"]["reason"]


@pytest.mark.parametrize(
    "key, needle",
    [("bad_trace", "trace"), ("bad_psd", "non-psd"), ("bad_herm", "non-hermitian"), ("junk", "malformed")],
)
def test_evaluate_bad_state(files, capsys, key, needle):
    assert run("evaluate", files[key], files["sx"]) == 1
    err = capsys.readouterr().err
    assert needle in err and str(files[key]) in err


def test_evaluate_dim_mismatch(files, capsys):
    assert run("evaluate", files["state"], files["big"]) == 1
    assert "dim mismatch" in capsys.readouterr().err


def test_audit_exit_codes(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("audit", "--trials", 100, "--seed", 3, "--out", a) == 0
    assert run("audit", "--trials", 100, "--seed", 3, "--workers", 2, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["ok"] is True
    assert run("audit", "--trials", 0) == 1
    with pytest.raises(SystemExit) as exc:
        run("audit", "--dims", "x")
    assert exc.value.code == 1
    monkeypatch.setattr(cli, "audit_theorems", partial(audit_theorems, evaluate=negated_evaluate))
    assert run("audit", "--trials", 20, "--out", tmp_path / "c.json") == 2


def test_falsify_exit_codes(capsys):
    assert run("falsify") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["found"] and out["counterexample"]["margin"] == pytest.approx(0.48, abs=1e-12)
    assert run("falsify", "--pure-only", "--trials", 300) == 3
    assert run("falsify", "--dim", 1) == 1


def test_gen(tmp_path):
    d1, d2 = tmp_path / "g1", tmp_path / "g2"
    assert run("gen", "--dim", 3, "--rank", 1, "--count", 3, "--seed", 5, "--out", d1) == 0
    assert run("gen", "--dim", 3, "--rank", 1, "--count", 3, "--seed", 5, "--out", d2) == 0
    files = sorted(d1.glob("*.json"))
    assert len(files) == 3
    for f in files:
        rho = validate(read_matrix(f))
        assert rho.purity() == pytest.approx(1.0, abs=1e-10)
        assert f.read_bytes() == (d2 / f.name).read_bytes()
    assert run("gen", "--dim", 2, "--kind", "observable", "--out", tmp_path / "o") == 0
    assert run("gen", "--dim", 2, "--rank", 3, "--out", tmp_path / "x") == 1
    assert run("gen", "--dim", 2) == 1


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "wyskew", "scan-pauli", "--grid", "4", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert len(out.read_text().splitlines()) == 5
    proc = subprocess.run([sys.executable, "-m", "wyskew", "falsify", "--dim", "1"], capture_output=True)
    assert proc.returncode == 1
