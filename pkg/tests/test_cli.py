import io
import json
import os
from pathlib import Path

import pytest

from pnrec.cli import run
from pnrec.models import build_s1_ch_model, dump_model, s1_closed_forms
from pnrec.parser import format_polynomial

GOLDEN = Path(__file__).parent / "golden"
DATA = Path(__file__).resolve().parents[1] / "gallery" / "data"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv, "--json")
    doc = json.loads(out) if out else None
    if doc:
        doc.pop("timing")
    return code, doc, err


GOLDEN_CASES = {
    "s1_ch": ["s1", "ch", "--max-orbit", "8", "--levels", "4", "--verify"],
    "s1_sft": ["s1", "sft", "--max-orbit", "12", "--levels", "2", "--verify"],
    "torsion_ch8": ["check", "torsion", "--model", "s1_ch_K8"],
    "pencil_so3": ["pencil", "expand", "--pencil", str(DATA / "so3_const.json"), "--seed", "z", "--order", "3"],
}


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden(name):
    argv = GOLDEN_CASES[name]
    code, out, _ = call(*argv)
    assert code == 0
    # the command echo carries a machine-specific path for file inputs
    body = "\n".join(line for line in out.splitlines() if not line.startswith("command:"))
    path = GOLDEN / f"{name}.txt"
    if os.environ.get("PNREC_REGEN_GOLDEN"):
        path.parent.mkdir(exist_ok=True)
        path.write_text(body + "\n")
    assert body + "\n" == path.read_text()


def test_s1_ch_report_matches_closed_forms():
    code, doc, _ = call_json("s1", "ch", "--max-orbit", "8", "--levels", "4", "--verify")
    assert code == 0
    table = build_s1_ch_model(8).table
    results = {r["name"]: r for r in doc["results"]}
    for n in range(5):
        r = results[f"X_1,{n}"]
        assert r["status"] == "pass"
        for l in range(1, 9):
            assert r["payload"][f"q{l}"] == format_polynomial(s1_closed_forms("ch_field", n, l, table=table))
    assert results["lie_commuting"]["status"] == "pass"


def test_torsion_zero():
    code, out, _ = call("check", "torsion", "--model", "s1_ch_K8")
    assert code == 0
    assert "residual = 0" in out


def test_torsion_nonzero_fails(tmp_path):
    doc = {"variables": [{"name": "x", "kind": "t", "parity": "even"},
                         {"name": "y", "kind": "t", "parity": "even"}],
           "endomorphism": [{"lower": "x", "upper": "x", "expr": "y"},
                            {"lower": "y", "upper": "y", "expr": "x"}]}
    path = tmp_path / "diag.json"
    path.write_text(json.dumps(doc))
    code, out, _ = call("check", "torsion", "--model", str(path))
    assert code == 1
    assert "summary: fail" in out


def test_pencil_tower_printed():
    code, doc, _ = call_json("pencil", "expand", "--pencil", "so3_const", "--seed", "z", "--order", "3")
    assert code == 0
    values = [r["payload"]["value"] for r in doc["results"] if r["name"].startswith("c_")]
    assert values == ["z", "-1/2*x^2-1/2*y^2-1/2*z^2", "0", "0"]


def test_check_lie_and_commute():
    assert call("check", "lie", "--model", "s1_ch_K8")[0] == 0
    assert call("check", "lie", "--model", "s1_sft_K6")[0] == 0
    assert call("check", "commute", "--model", "s1_ch_K8", "--levels", "3")[0] == 0
    code, out, _ = call("check", "commute", "--model", "s1_sft_K12", "--levels", "2", "--window", "3")
    assert code == 0, out


def test_model_validate_and_print(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(dump_model(build_s1_ch_model(3))))
    assert call("model", "validate", "--model", str(path))[0] == 0
    code, out, _ = call("model", "print", "--model", "s1_ch_K3")
    assert code == 0
    assert json.loads(out) == json.loads(json.dumps(dump_model(build_s1_ch_model(3))))


def test_repeated_runs_identical():
    for argv in GOLDEN_CASES.values():
        assert call(*argv) == call(*argv)
        assert call_json(*argv) == call_json(*argv)


def test_fingerprint_in_report():
    _, a, _ = call_json("check", "torsion", "--model", "s1_ch_K8")
    _, b, _ = call_json("check", "torsion", "--model", "s1_ch_K7")
    assert a["fingerprint"] and a["fingerprint"] != b["fingerprint"]


@pytest.mark.parametrize("argv", [
    [],
    ["s1"],
    ["s1", "ch", "--levels", "-1"],
    ["s1", "ch", "--max-orbit", "zero"],
    ["s1", "sft", "--normalization", "other"],
    ["check", "torsion"],
    ["check", "torsion", "--model", "/nonexistent/model.json"],
    ["pencil", "expand", "--pencil", "so3_const", "--seed", "z"],
])
def test_usage_errors(argv):
    code, out, err = call(*argv)
    assert code == 2
    assert out == ""
    assert err


@pytest.mark.parametrize("argv, kind", [
    (["pencil", "expand", "--pencil", "so3_const", "--seed", "x", "--order", "2"], "SeedNotCasimir"),
    (["pencil", "expand", "--pencil", "so3_const", "--seed", "z +", "--order", "2"], "ParseError"),
    (["pencil", "expand", "--pencil", "so3_const", "--seed", "z", "--order", "2", "--degree-bound", "1"],
     "NoSolutionWithinDegree"),
    (["check", "commute", "--model", "s1_sft_K12", "--levels", "3", "--window", "3"], "WindowTooSmall"),
    (["check", "torsion", "--model", "so3_const"], "ModelError"),
])
def test_computation_errors(argv, kind):
    code, out, err = call(*argv)
    assert code == 1
    assert err.startswith(f"error: {kind}")


def test_bad_document(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"variables": [], "extra": 1}')
    code, _, err = call("model", "validate", "--model", str(path))
    assert code == 1 and "extra" in err


def test_threads_variable(monkeypatch):
    monkeypatch.setenv("PNREC_THREADS", "4")
    assert call("check", "torsion", "--model", "s1_ch_K4")[0] == 0
    monkeypatch.setenv("PNREC_THREADS", "none")
    assert call("check", "torsion", "--model", "s1_ch_K4")[0] == 2
