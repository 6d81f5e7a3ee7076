"""End-to-end command-line tests, one or more per exit code."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from sepower.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_rho_cnn_z2_has_two_members(capsys):
    code, rep = report(capsys, "rho", CONFIGS / "cnn1_z2.json")
    assert code == 0
    assert len(rep["result"]["members"]) == 2
    assert rep["schema_version"] == 1 and rep["command"] == "rho"
    assert rep["exit_code"] == 0 and len(rep["inputs_digest"]) == 64


def test_rho_sum_readout_single_member(capsys):
    code, rep = report(capsys, "rho", CONFIGS / "sum_readout.json")
    assert code == 0 and len(rep["result"]["members"]) == 1


def test_reports_are_byte_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["rho", str(CONFIGS / "cnn2_z3.json"), "--output", str(a)]) == 0
    assert main(["--threads", "4", "rho", str(CONFIGS / "cnn2_z3.json"), "-o", str(b)]) == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    ra.pop("timing"), rb.pop("timing")
    assert json.dumps(ra, sort_keys=True) == json.dumps(rb, sort_keys=True)
    assert ra["report_digest"] == rb["report_digest"]


def test_identify(capsys):
    code, rep = report(capsys, "identify", CONFIGS / "cnn3_z3.json", "--alpha", "1,2,3", "--beta", "2,3,1")
    assert code == 0 and rep["result"]["identified"] is True
    code, rep = report(capsys, "identify", CONFIGS / "cnn3_z3.json", "--alpha", "1,2,3", "--beta", "1,3,2",
                       "--expect", "identified")
    assert code == 1 and rep["result"]["identified"] is False


def test_compare(capsys):
    code, rep = report(capsys, "compare", CONFIGS / "cnn3_z3.json", CONFIGS / "cnn1_z3.json",
                       "--expect", "strict-subset")
    assert code == 0 and rep["result"]["verdict"] == "StrictSubset"
    code, rep = report(capsys, "compare", CONFIGS / "cnn1_z3.json", CONFIGS / "cnn3_z3.json",
                       "--expect", "subset")
    assert code == 1 and rep["result"]["verdict"] == "StrictSuperset"


def test_compare_dimension_mismatch(capsys):
    code, _, err = run(capsys, "compare", CONFIGS / "cnn1_z2.json", CONFIGS / "cnn1_z3.json")
    assert code == 2 and "input dimensions" in err


def test_stabilize(capsys):
    code, rep = report(capsys, "stabilize", CONFIGS / "depth_z3.json", "--layer", "0", "--max", "3")
    assert code == 0
    assert rep["result"]["threshold"] == 1 and rep["result"]["monotone"]
    code, _, err = run(capsys, "stabilize", CONFIGS / "depth_z3.json", "--layer", "1")
    assert code == 2 and "identity" in err
    code, _, _ = run(capsys, "stabilize", CONFIGS / "depth_z3.json", "--layer", "5")
    assert code == 2


def test_empirical(capsys):
    code, rep = report(capsys, "empirical", CONFIGS / "cnn3_z3.json", "--alpha", "1,2,3", "--beta", "1,3,2",
                       "--samples", "100", "--seed", "2")
    assert code == 0 and rep["result"]["kind"] == "Separated"
    code, rep = report(capsys, "empirical", CONFIGS / "cnn1_z2.json", "--alpha", "1,2", "--beta", "2,1",
                       "--samples", "100", "--activation", "tanh", "--scales", "1")
    assert code == 0 and rep["result"]["kind"] == "LikelyIdentified"


def test_empirical_graphs(capsys):
    code, rep = report(capsys, "empirical", CONFIGS / "ign2_s3.json", "--graph-a", CONFIGS / "triangle.txt",
                       "--graph-b", CONFIGS / "path3.txt", "--samples", "200")
    assert code == 0
    assert rep["result"]["kind"] == "Separated" and rep["result"]["wl2_separates"]


@pytest.mark.parametrize("extra", [["--alpha", "1,2,3"], ["--alpha", "1,2", "--beta", "1,2"],
                                   ["--alpha", "1,x,3", "--beta", "1,2,3"],
                                   ["--alpha", "1,2,3", "--beta", "1,2,3", "--scales", "a"],
                                   ["--graph-a", "missing.txt", "--graph-b", "missing.txt"]])
def test_empirical_input_errors(capsys, extra):
    code, _, _ = run(capsys, "empirical", CONFIGS / "cnn3_z3.json", *extra)
    assert code == 2


def test_basis(capsys):
    code, rep = report(capsys, "basis", "--group", "symmetric(4)", "power(4,2)", "--expect", "15")
    assert code == 0 and rep["result"]["generators"] == 15
    code, rep = report(capsys, "basis", "--group", "cyclic(5)", "regular", "--matrices")
    assert rep["result"]["generators"] == 5 and len(rep["result"]["matrices"]) == 5
    code, _ = report(capsys, "basis", "--group", "symmetric(3)", "power(3,2)", "--expect", "15")
    assert code == 1
    code, _, _ = run(capsys, "basis", "--group", "symmetric(3)", "power(5,2)")
    assert code == 2


def test_verify(capsys):
    code, rep = report(capsys, "verify", "width")
    assert code == 0 and rep["result"]["passed"]
    code, rep = report(capsys, "verify", "regular", "--format", "json")
    assert code == 0 and rep["result"]["counterexample"] is None


def test_verify_failure_serializes_counterexample(capsys, monkeypatch):
    from sepower import cli
    from sepower.suites import SuiteResult

    def failing(limits=None):
        r = SuiteResult("regular")
        r.add("always", True)
        r.add("never", False, members=3)
        return r

    monkeypatch.setitem(cli.SUITES, "regular", failing)
    monkeypatch.setattr("sepower.suites.SUITES", cli.SUITES)
    code, rep = report(capsys, "verify", "regular")
    assert code == 1
    assert rep["result"]["counterexample"] == {"name": "never", "passed": False, "detail": {"members": 3}}


def test_unknown_suite(capsys):
    code, _, err = run(capsys, "verify", "nonsense")
    assert code == 2 and "unknown suite" in err


def test_malformed_group_is_input_error(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"group": "cyclic(x)", "input": "natural", "layers": [{"target": "trivial"}]}))
    code, _, err = run(capsys, "rho", p)
    assert code == 2 and err.startswith("sepower: input error: group")


def test_bad_arguments_are_input_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "rho")[0] == 2
    assert run(capsys, "rho", "/nonexistent.json")[0] == 2


def test_resource_limit_exit_code(capsys):
    code, rep = report(capsys, "rho", CONFIGS / "ign2_s3.json", "--max-union-members", "2")
    assert code == 3
    assert rep["result"] is None and "limit 2" in rep["error"]
    assert rep["stats"]["nodes"] > 0 and "wall_seconds" not in rep["stats"]
    code, _ = report(capsys, "rho", CONFIGS / "regular_s3_a3.json", "--max-block-size", "3")
    assert code == 3


def test_text_format(capsys):
    code, out, _ = run(capsys, "compare", CONFIGS / "cnn3_z3.json", CONFIGS / "cnn1_z3.json", "--format", "text")
    assert code == 0
    assert "result.verdict = StrictSubset" in out


def test_unwritable_output(capsys):
    code, _, err = run(capsys, "rho", CONFIGS / "cnn1_z2.json", "--output", "/nonexistent/dir/x.json")
    assert code == 2 and "cannot write" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sepower", "rho", str(CONFIGS / "cnn1_z2.json"),
                           "--format", "text"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("sepower ")
