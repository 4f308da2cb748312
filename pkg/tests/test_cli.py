import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from nilgeom import BracketTensor, standard_structure
from nilgeom import document
from nilgeom.cli import EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def emit(tmp_path, capsys, name, *params):
    path = tmp_path / ("_".join([name, *params]) + ".json")
    args = ["catalog", name, "--out", path]
    for p in params:
        args += ["--param", p]
    code, _, _ = run(capsys, *args)
    assert code == EXIT_OK
    return path


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "--list", "--json")
    assert code == EXIT_OK
    entries = json.loads(out)
    names = {e["name"] for e in entries}
    assert {"heisenberg", "filiform4", "abc_curve", "m26_curve", "hypercomplex_curve"} <= names
    assert len(out.strip().splitlines()) == 1


def test_catalog_emits_document(capsys):
    code, out, _ = run(capsys, "catalog", "abc", "--param", "a=1", "--param", "b=3", "--param", "c=2")
    assert code == EXIT_OK
    doc = document.loads(out)
    assert doc.bracket.coeffs[1, 2, 5] == 2.0
    assert doc.metadata == {"catalog": "abc", "params": {"a": 1.0, "b": 3.0, "c": 2.0}}


def test_catalog_bad_input(capsys):
    assert run(capsys, "catalog", "nope")[0] == EXIT_INPUT
    assert run(capsys, "catalog", "abc", "--param", "a")[0] == EXIT_INPUT
    assert run(capsys, "catalog", "abc", "--param", "z=1")[0] == EXIT_INPUT
    assert run(capsys, "catalog", "heisenberg", "--param", "n=3")[0] == EXIT_INPUT


def test_validate(tmp_path, capsys):
    code, out, _ = run(capsys, "validate", emit(tmp_path, capsys, "abc_curve", "t=0.3"))
    report = json.loads(out)
    assert code == EXIT_OK and report["valid"]
    assert report["nilpotency_index"] == 2
    assert report["residuals"]["closedness"] < 1e-15


def test_validate_rejects_unclosed_abc(tmp_path, capsys):
    path = emit(tmp_path, capsys, "abc", "a=1", "b=1", "c=1")
    code, out, err = run(capsys, "validate", path)
    assert code == EXIT_NEGATIVE
    assert json.loads(out)["residuals"]["closedness"] > 0.1


def test_validate_printed_m26_point_is_not_lie(tmp_path, capsys):
    # the printed ellipse point x = 1, y = 0 fails the Jacobi identity; the warning reaches stderr
    path = emit(tmp_path, capsys, "m26", "x=1", "y=0")
    code, out, _ = run(capsys, "validate", path)
    assert code == EXIT_NEGATIVE
    assert json.loads(out)["jacobi"] > 1e-2


def test_validate_hypercomplex(tmp_path, capsys):
    code, out, _ = run(capsys, "validate", "--json", emit(tmp_path, capsys, "hypercomplex_curve", "t=0.3"))
    report = json.loads(out)
    assert code == EXIT_OK
    assert len(report["residuals"]["nijenhuis"]) == 3


def test_minimal_and_type_filiform(tmp_path, capsys):
    path = emit(tmp_path, capsys, "filiform4")
    code, out, _ = run(capsys, "minimal", path)
    report = json.loads(out)
    assert code == EXIT_OK
    assert report["verdict"] == "minimal"
    assert report["c"] == pytest.approx(-1.25, abs=1e-12)
    code, out, _ = run(capsys, "type", path)
    assert code == EXIT_OK and json.loads(out)["type"] == "1<2<3<4;1,1,1,1"


def test_zero_bracket_is_trivially_minimal(tmp_path, capsys):
    path = tmp_path / "zero.json"
    document.dump(document.document_for(BracketTensor.zero(4), standard_structure("symplectic", 4)), path)
    code, out, _ = run(capsys, "minimal", path)
    assert code == EXIT_OK
    assert json.loads(out)["verdict"] == "abelian_trivial"


def test_minimal_negative_on_perturbation(tmp_path, capsys):
    src = emit(tmp_path, capsys, "abc_curve", "t=0.3")
    pert = tmp_path / "p.json"
    assert run(capsys, "perturb", src, "--scale", "0.5", "--seed", "3", "--out", pert)[0] == EXIT_OK
    code, out, _ = run(capsys, "minimal", pert)
    assert code == EXIT_NEGATIVE and json.loads(out)["verdict"] == "not_minimal"
    assert run(capsys, "type", pert)[0] == EXIT_NEGATIVE
    code, out, _ = run(capsys, "validate", pert)
    assert code == EXIT_OK


def test_perturb_orthogonal_keeps_invariants(tmp_path, capsys):
    src = emit(tmp_path, capsys, "m26_curve", "u=0.4")
    iso = tmp_path / "iso.json"
    assert run(capsys, "perturb", src, "--orthogonal", "--seed", "5", "--out", iso)[0] == EXIT_OK
    a, b = document.load(src).bracket, document.load(iso).bracket
    assert np.abs(a.coeffs - b.coeffs).max() > 1e-3
    code, out, _ = run(capsys, "distinguish", src, iso)
    assert code == EXIT_NEGATIVE and json.loads(out)["verdict"] == "inconclusive"


def test_distinguish_abc_points(tmp_path, capsys):
    a = emit(tmp_path, capsys, "abc_curve", "t=0.0")
    b = emit(tmp_path, capsys, "abc_curve", "t=0.5")
    code, out, _ = run(capsys, "distinguish", a, b, "--tol", "1e-6")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["verdict"] == "distinct"
    # the centers have different dimensions, so the spectra are incomparable
    assert report["difference"] is None
    b = emit(tmp_path, capsys, "abc_curve", "t=0.2")
    c = emit(tmp_path, capsys, "abc_curve", "t=0.5")
    code, out, _ = run(capsys, "distinguish", b, c, "--tol", "1e-6")
    assert code == EXIT_OK and json.loads(out)["difference"] > 1e-6
    code, out, _ = run(capsys, "distinguish", a, b, "--normalization", "ricci")
    assert code == EXIT_OK


def test_distinguish_different_kinds(tmp_path, capsys):
    a = emit(tmp_path, capsys, "abc_curve")
    b = emit(tmp_path, capsys, "complex_abelian_curve")
    code, out, _ = run(capsys, "distinguish", a, b)
    assert code == EXIT_OK and json.loads(out)["reason"] == "structure kinds differ"


def test_flow_with_perturbation_and_csv(tmp_path, capsys):
    src = emit(tmp_path, capsys, "filiform4")
    out_csv, end = tmp_path / "trace.csv", tmp_path / "end.json"
    code, out, _ = run(capsys, "flow", src, "--perturb", "0.5", "--seed", "1", "--out", out_csv, "--endpoint", end)
    report = json.loads(out)
    assert code == EXIT_OK and report["converged"]
    assert report["type"] == "1<2<3<4;1,1,1,1"
    assert report["max_F_increase"] <= 1e-9
    assert report["F_end"] < report["F_start"]
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == report["steps"] + 1
    assert float(rows[-1]["F"]) == pytest.approx(report["F_end"])
    assert document.load(end).metadata == {"source": "flow endpoint"}


def test_flow_step_limit(tmp_path, capsys):
    src = emit(tmp_path, capsys, "abc_curve", "t=0.3")
    code, out, _ = run(capsys, "flow", src, "--perturb", "0.5", "--max-steps", "2")
    assert code == EXIT_NEGATIVE and json.loads(out)["steps"] == 2


def test_ricci_report(tmp_path, capsys):
    code, out, _ = run(capsys, "ricci", emit(tmp_path, capsys, "filiform4"))
    report = json.loads(out)
    assert code == EXIT_OK
    assert np.allclose(report["ricci"], np.diag([-1.0, -0.5, 0.0, 0.5]))
    assert np.allclose(report["moment_map"], 8 * np.array(report["ricci"]))
    assert report["scal"] == pytest.approx(-1.0)


def test_unreadable_inputs(tmp_path, capsys):
    code, _, err = run(capsys, "validate", tmp_path / "missing.json")
    assert code == EXIT_INPUT and "missing.json" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 3,\n "brackets": [[1, 2, 3, 1], [2, 1, 3, 1]]}')
    code, _, err = run(capsys, "validate", bad)
    assert code == EXIT_INPUT and "brackets[1]" in err
    bad.write_text("{\n  nope")
    code, _, err = run(capsys, "ricci", bad)
    assert code == EXIT_INPUT and "line 2" in err


def test_non_lie_rejected_by_minimal(tmp_path, capsys):
    path = tmp_path / "x.json"
    path.write_text('{"dim": 4, "brackets": [[1, 2, 3, 1.0], [3, 4, 1, 1.0]]}')
    assert run(capsys, "minimal", path)[0] == EXIT_INPUT


def test_tolerance_from_environment(tmp_path, capsys, monkeypatch):
    path = emit(tmp_path, capsys, "filiform4")
    monkeypatch.setenv("NILGEOM_TOL", "1e-4")
    code, out, _ = run(capsys, "validate", path)
    assert json.loads(out)["tol"] == 1e-4
    code, out, _ = run(capsys, "validate", path, "--tol", "1e-7")
    assert json.loads(out)["tol"] == 1e-7
    monkeypatch.setenv("NILGEOM_TOL", "garbage")
    code, out, err = run(capsys, "validate", path)
    assert json.loads(out)["tol"] == 1e-9 and "NILGEOM_TOL" in err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "nilgeom", "catalog", "--list", "--json"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)
