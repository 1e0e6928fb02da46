from __future__ import annotations

import json

import pytest

from commrank.cli import main
from commrank.corpus import decomposition_instances, pattern_group_generators
from commrank.matgroup import MonomialMatrix


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    doc = json.loads(out) if out else None
    return code, doc, err


@pytest.fixture
def ts_file(tmp_path):
    t, s = pattern_group_generators()
    path = tmp_path / "ts.json"
    path.write_text(json.dumps({"generators": [t.to_json(), s.to_json()]}))
    return str(path)


@pytest.fixture
def ts_abelian_file(tmp_path):
    _, gens = decomposition_instances(full=False)[0]
    path = tmp_path / "ts_abelian.json"
    path.write_text(json.dumps([g.to_json() for g in gens]))
    return str(path)


def test_gpqa_two_two(capsys):
    code, doc, _ = run_json(capsys, "gpqa", "--p", "2", "--q", "2", "--a", "0,1")
    assert code == 0
    assert doc["schema"] == "report-v1"
    payload = doc["payload"]
    assert (payload["order"], payload["rho"], payload["r"]) == (8, 1, 2)


def test_gpqa_three_two(capsys):
    code, doc, _ = run_json(capsys, "gpqa", "--p", "3", "--q", "2", "--a", "1,0,0")
    assert code == 0
    assert doc["payload"]["commutator_order"] == 4
    assert doc["payload"]["diagonal_order"] == 8


def test_gpqa_text_output(capsys):
    code, out, _ = run(capsys, "gpqa", "--p", "5", "--q", "2", "--a", "1,1,0,0,0")
    assert code == 0
    assert "rho2 commutator rank  4 (claimed 4)" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["gpqa", "--p", "3", "--q", "2", "--a", "0,0,0"],
        ["gpqa", "--p", "4", "--q", "2", "--a", "0,0,0,1"],
        ["gpqa", "--p", "3", "--q", "2", "--a", "x,y"],
        ["gpqa", "--p", "3", "--q", "2"],
        ["gpqa", "--p", "2", "--q", "2", "--a", "0,1", "--cap", "0"],
        ["invariants", "--gens", "/nonexistent/file.json"],
        ["verify-paper", "--case", "9.9"],
        ["frobnicate"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_two_input_sources_rejected(capsys, ts_file):
    code, _, err = run(capsys, "invariants", "--gens", ts_file, "--p", "2")
    assert code == 2 and "exactly one input" in err


def test_cap_exceeded_exit_3(capsys):
    code, _, _ = run(capsys, "gpqa", "--p", "3", "--q", "3", "--a", "0,0,1", "--cap", "10")
    assert code == 3


def test_cap_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("MONO_CAP", "10")
    code, _, _ = run(capsys, "gpqa", "--p", "3", "--q", "3", "--a", "0,0,1")
    assert code == 3
    monkeypatch.setenv("MONO_CAP", "nope")
    code, _, _ = run(capsys, "gpqa", "--p", "2", "--q", "2", "--a", "0,1")
    assert code == 2


def test_burnside_on_pattern_group(capsys, ts_file):
    code, out, _ = run(capsys, "burnside", "--gens", ts_file)
    assert code == 0
    assert "irreducible  true" in out


def test_burnside_reports_invariant_subspace(capsys, ts_abelian_file):
    code, doc, _ = run_json(capsys, "burnside", "--gens", ts_abelian_file)
    assert code == 0
    assert doc["payload"]["irreducible"] is False
    assert doc["payload"]["invariant_subspace"]["status"] == "found"


def test_decompose(capsys, ts_abelian_file):
    code, doc, _ = run_json(capsys, "decompose", "--gens", ts_abelian_file)
    assert code == 0
    assert doc["payload"]["dim_M"] == 3 and doc["payload"]["ok"]


def test_decompose_precondition_violation(capsys):
    code, _, err = run(capsys, "decompose", "--p", "5", "--q", "2", "--a", "1,1,0,0,0")
    assert code == 2 and "> 2" in err


def test_invariants_on_diagonal_group(capsys, tmp_path):
    path = tmp_path / "diag.json"
    path.write_text(json.dumps([MonomialMatrix([0, 1, 2], [1, 0, 2], 3).to_json()]))
    code, doc, _ = run_json(capsys, "invariants", "--gens", str(path))
    assert code == 0
    assert doc["payload"]["r"] == 0 and doc["payload"]["abelian"] is True


def test_stabilizer(capsys, ts_abelian_file, tmp_path):
    sub = tmp_path / "m.json"
    basis = [[1 if j == i else 0 for j in range(5)] for i in range(3)]
    sub.write_text(json.dumps({"n": 5, "order": 1, "basis": basis}))
    code, doc, _ = run_json(capsys, "stabilizer", "--gens", ts_abelian_file, "--subspace", str(sub))
    assert code == 0
    assert doc["payload"]["holds"] and doc["payload"]["abelian_on_complement"]
    code, _, _ = run(capsys, "stabilizer", "--gens", ts_abelian_file)
    assert code == 2


def test_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "gpqa", "--p", "2", "--q", "2", "--a", "0,1", "--format", "json", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["payload"]["order"] == 8


def test_verify_paper_single_case(capsys):
    code, out, _ = run(capsys, "verify-paper", "--case", "2.8")
    assert code == 0
    assert "result: PASS" in out


def test_verify_paper_rho_two_sweep(capsys):
    code, doc, _ = run_json(capsys, "verify-paper", "--case", "3.3", "--p-max", "5", "--q-max", "3")
    assert code == 0
    assert doc["payload"]["summary"]["failures"] == 0


def test_verify_paper_failure_exits_1(capsys):
    code, out, _ = run(capsys, "verify-paper", "--case", "3.1", "--p-max", "3", "--q-max", "3")
    assert code == 1
    assert "result: FAIL" in out
