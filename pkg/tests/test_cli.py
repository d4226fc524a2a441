from __future__ import annotations

import json
from pathlib import Path

import pytest

from curvlab.cli import main, parse_quantity
from curvlab.curvature import NamedQuantity

INPUTS = Path(__file__).resolve().parents[1] / "inputs"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_unknown_id(capsys):
    code, _, err = run(["verify", "bogus-id"], capsys)
    assert code == 2
    assert "check-abcd" in err and "theorem-search" in err


def test_verify_abcd_both_signs(capsys):
    code, out, _ = run(["verify", "check-abcd", "--k-max", 2, "--sign", "both"], capsys)
    reports = json.loads(out)
    assert code == 0
    assert [r["params"]["s"] for r in reports] == [-1, 1]
    assert all(r["verdict"] == "pass" for r in reports)


def test_verify_all_groups(tmp_path, capsys):
    path = tmp_path / "all.json"
    code, out, _ = run(["verify", "all", "--k-max", 2, "--out", path, "--omit-timing"], capsys)
    assert code == 0
    reports = json.loads(path.read_text())
    assert len({r["lemma"] for r in reports}) == 9
    assert out.count("PASS") == len(reports)


def test_reports_are_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert run(["verify", "check-basis-change-lemma", "--seed", 5, "--out", p, "--omit-timing"], capsys)[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_verify_rejects_float_mode(capsys):
    assert run(["verify", "check-abcd", "--mode", "float"], capsys)[0] == 2


@pytest.mark.parametrize("argv", [["--tol", "0"], ["--parallelism", "0"], ["--k-max", "0"], ["--sign", "x"]])
def test_bad_flags(argv, capsys):
    assert run(["verify", "check-abcd", *argv], capsys)[0] == 2


@pytest.mark.parametrize("model, quantity, expected", [
    ("form32.json", "A:k=1", "-l1*w13"),
    ("form32.json", "T:k=2,p=0,q=0,r=1,X=3,Y=3", "-l1*gamma*s*w34"),
    ("form32.json", "C:k=3", "-l1^3*w14"),
    ("flat.json", "component:k=2,idx=1,2,3,4,1,2", "0"),
])
def test_eval_examples(model, quantity, expected, capsys):
    code, out, _ = run(["eval", INPUTS / model, quantity], capsys)
    assert code == 0 and out.strip() == expected


def test_eval_with_bindings_and_float(capsys):
    code, out, _ = run(["eval", INPUTS / "form32.json", "A:k=3", "--set", "l1=2", "--set", "s=1"], capsys)
    assert code == 0 and out.strip() == "-8*w13"
    code, out, _ = run(["eval", INPUTS / "flat.json", "component:idx=1,2", "--mode", "float"], capsys)
    assert code == 0 and float(out) == 1.0


def test_eval_malformed_model(tmp_path, capsys):
    doc = json.loads((INPUTS / "flat.json").read_text())
    doc["S"][1] = [0, 0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(["eval", path, "A:k=1"], capsys)
    assert code == 2 and "$.S[1]" in err
    path.write_text("{not json")
    assert run(["eval", path, "A:k=1"], capsys)[0] == 2


def test_eval_invariant_violation(tmp_path, capsys):
    doc = json.loads((INPUTS / "flat.json").read_text())
    doc["omega"] = [[0] * 4 for _ in range(4)]
    path = tmp_path / "degenerate.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(["eval", path, "A:k=1"], capsys)
    assert code == 3 and "omega degenerate" in err


@pytest.mark.parametrize("spec", ["Z:k=1", "A", "A:k=x", "T:k=2,p=0", "component:k=1,idx=1,2"])
def test_eval_bad_quantity(spec, capsys):
    assert run(["eval", INPUTS / "form32.json", spec], capsys)[0] == 2


def test_parse_quantity():
    assert parse_quantity("E:k=2,i=3,X=1,Y=4") == NamedQuantity("E", 2, i=3, X=0, Y=3)
    assert parse_quantity("component:idx=1,2,3,4") == (0, 1, 2, 3)


def test_search_single_point(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["search", INPUTS / "sweep_single_point.json", "--k-max", 3, "--out", out], capsys)
    assert code == 0
    numeric = [r for r in json.loads(out.read_text()) if r["params"]["campaign"] == "numeric"][0]
    assert numeric["details"]["table"][0]["rank"] == 1
    assert numeric["details"]["violators"] == []


def test_search_absurd_tolerance(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"tolerance": 10}))
    code, _, err = run(["search", path], capsys)
    assert code == 2 and "tolerance exceeds signal" in err


def test_jet_random_and_torsion(tmp_path, capsys):
    out = tmp_path / "j.json"
    code, _, _ = run(["jet", "--k", 1, "--trials", 6, "--dims", "2,3", "--seed", 7, "--out", out], capsys)
    assert code == 0
    (report,) = json.loads(out.read_text())
    assert report["params"]["seed"] == 7 and len(report["residuals"]) == 6
    code, _, err = run(["jet", INPUTS / "jet_torsion.json"], capsys)
    assert code == 3 and "connection has torsion" in err


def test_report_merge(tmp_path, capsys):
    a, b, merged = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "m.json"
    run(["verify", "check-abcd", "--k-max", 2, "--sign", "+", "--out", a], capsys)
    run(["verify", "check-abcd", "--k-max", 2, "--sign", "-", "--out", b], capsys)
    code, _, _ = run(["report-merge", b, a, "--out", merged], capsys)
    assert code == 0
    assert [r["params"]["s"] for r in json.loads(merged.read_text())] == [-1, 1]
    failing = json.loads(a.read_text())
    failing[0]["verdict"] = "fail"
    a.write_text(json.dumps(failing))
    assert run(["report-merge", a, b], capsys)[0] == 1
