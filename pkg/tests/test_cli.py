import csv
import io
import json
import subprocess
import sys

import pytest

from distblock import cli, sweeps


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def lines(text):
    return [json.loads(x) for x in text.splitlines()]


def test_invariants_report():
    code, text = run("invariants", "1,1,5", "--verify")
    rep = json.loads(text)
    assert code == 0 and rep["ok"]
    assert rep["outputs"]["det"] == "32" and rep["outputs"]["cof"] == "-16" and rep["outputs"]["lambda"] == "-2"
    assert len(rep["inputs_sha256"]) == 64
    assert "timing" not in rep


def test_reports_are_byte_identical():
    a = run("compute", "star_of_blocks:1,1,5x2", "--what", "inverse", "--verify")
    b = run("compute", "star_of_blocks:1,1,5x2", "--what", "inverse", "--verify")
    assert a == b
    s1 = run("sweep", "multiblock", "--count", "5", "--seed", "3")
    s2 = run("sweep", "multiblock", "--count", "5", "--seed", "3", "--workers", "2")
    assert s1 == s2


def test_digest_ignores_format():
    _, a = run("invariants", "2,3")
    _, b = run("invariants", "2,3", "--format", "jsonl")
    assert json.loads(a)["inputs_sha256"] == json.loads(b)["inputs_sha256"]
    _, c = run("invariants", "2,4")
    assert json.loads(a)["inputs_sha256"] != json.loads(c)["inputs_sha256"]


def test_timing_flag():
    _, text = run("invariants", "2,3", "--timing")
    assert "seconds" in json.loads(text)["timing"]


def test_classify():
    code, text = run("classify", "K_{1,1,4}", "--verify")
    out = json.loads(text)["outputs"]
    assert code == 0
    assert out["cof"]["zero"] and out["cof"]["witness"] == {"ones": 2, "tail": [4]}
    assert out["lambda"] is None


@pytest.mark.parametrize("what", ["det", "cof", "lambda", "mu", "inverse"])
def test_compute_verifies(what):
    code, text = run("compute", "tree:0-1,1-2,1-3", "--what", what, "--verify")
    assert code == 0 and json.loads(text)["ok"]


def test_compute_routes_t6():
    code, text = run("compute", "t6_tn:5,2", "--what", "inverse", "--verify")
    rep = json.loads(text)
    assert code == 0 and rep["ok"] and rep["outputs"]["route"].startswith("t6_tn")
    code, text = run("compute", "t6_tn:5,2", "--what", "det", "--verify")
    assert code == 0 and json.loads(text)["outputs"]["value"] == "-256"


def test_formula_inapplicable_is_input_error():
    code, text = run("compute", "t6_tn:7,1", "--what", "lambda")
    rep = json.loads(text)
    assert code == 2 and rep["error"] == "FormulaInapplicable" and "cof D = 0" in rep["message"]
    code, text = run("inverse", "2,2,3")
    assert code == 2


def test_bad_input_exit_codes():
    assert run("invariants", "x,y")[0] == 2
    assert run("t6", "--n", "6", "--b", "1")[0] == 2
    assert run("compute", "2,3", "--what", "det", "--max-vertices", "4")[0] == 2
    assert run("sweep", "closed-forms", "--max-vertices", "40")[0] == 2
    assert run("nonsense")[0] == 2


def test_inverse_both():
    code, text = run("inverse", "2,3", "--method", "both")
    rep = json.loads(text)
    assert code == 0 and rep["verdicts"] == {"closed = oracle": True}
    assert rep["outputs"]["closed"] == rep["outputs"]["oracle"]


def test_enumerate_stream():
    code, text = run("enumerate", "--m", "3", "--max-part", "6", "--filter", "lneg")
    rows = lines(text)
    assert code == 0
    assert [r["spec"] for r in rows[:-1]] == [[1, 1, 5], [1, 1, 6]]
    assert rows[-1]["summary"] and rows[-1]["count"] == 2


def test_family_commands():
    code, text = run("family", "negative", "--m", "7", "--k", "2", "--count", "4", "--verify")
    rows = lines(text)
    assert code == 0 and len(rows) == 5 and rows[-1]["ok"]
    assert len({tuple(r["spec"]) for r in rows[:-1]}) == 4
    code, text = run("family", "ex4.7", "--param", "b1=1", "--param", "x=2", "--verify")
    rows = lines(text)
    assert code == 0 and rows[0]["lambda"] == "0" and rows[0]["oracle_det"] == "0"
    assert run("family", "negative", "--m", "4", "--k", "1")[0] == 2


def test_t6_emit():
    code, text = run("t6", "--n", "7", "--b", "1", "--emit", "R", "--emit", "C", "--verify")
    rep = json.loads(text)
    assert code == 0 and rep["ok"] and rep["outputs"]["det"] == "256"
    assert len(rep["outputs"]["R"]) == 12 and len(rep["outputs"]["C"]) == 12
    assert len(rep["verdicts"]) == 9


def test_csv_output():
    code, text = run("sweep", "tn-lambda", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0
    assert rows[0]["n"] == "3" and rows[0]["lambda"] == "2/3"
    assert rows[-1]["summary"] == "True"


def test_sweep_failure_reports_counterexample(monkeypatch):
    def broken(item):
        return {"item": item, "ok": item != 5}

    monkeypatch.setitem(sweeps.SUITES, "tn-lambda", sweeps.Suite("tn-lambda", sweeps._tn_items, broken, ""))
    code, text = run("sweep", "tn-lambda")
    summary = lines(text)[-1]
    assert code == 1
    assert summary["failed"] == 1 and summary["first_counterexample"] == {"item": 5, "ok": False}


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "distblock", "invariants", "1,1,1", "--format", "jsonl"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert r.returncode == 0
    assert json.loads(r.stdout)["outputs"]["cof"] == "3"
