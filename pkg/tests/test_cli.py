import json
from pathlib import Path

import pytest

from simonlab import cli

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count_json_and_tsv(capsys):
    code, out, _ = run(capsys, "count", "--p", "2", "--n", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["command"] == "count"
    assert [r["count_FD"] for r in rep["result"]["table"]] == [6, 9, 1]
    code, out, _ = run(capsys, "count", "--p", "2", "--n", "4", "--h", "2", "--tsv")
    lines = out.strip().splitlines()
    assert lines[0].split("\t")[:3] == ["h", "D", "alpha"] and "35" in lines[1].split("\t")


def test_kernel_command(capsys):
    code, out, _ = run(capsys, "kernel", "--matrix", str(DATA / "kernel_p_matrix.json"))
    res = json.loads(out)["result"]
    assert code == 0 and res["label"] == "KERNEL_P" and res["kernel"]["basis"] == [[1, 1]]


def test_round_dist(capsys):
    code, out, _ = run(capsys, "round-dist", "--matrix", str(DATA / "identity_f3.json"))
    assert code == 0 and json.loads(out)["command"] == "round-dist"


def test_qs_pass_and_inconsistent(capsys):
    code, out, _ = run(capsys, "qs", "--partial", str(DATA / "two_zeros.json"), "--mode", "both")
    res = json.loads(out)["result"]
    assert code == 0 and res["pass"] and res["degree"] <= res["bound"]
    code, out, _ = run(capsys, "qs", "--partial", str(DATA / "inconsistent_f3.json"))
    res = json.loads(out)["result"]
    assert res["consistent"] is False and res["degree"] == -1


def test_qofd(capsys):
    code, out, _ = run(capsys, "qofd", "--circuit", str(DATA / "circuit_kernel_indicator.json"))
    res = json.loads(out)["result"]
    assert code == 0 and res["degree"] <= res["bound"] == 2


def test_bundled_circuit_roundtrip(capsys, tmp_path):
    code, out, _ = run(capsys, "bundled-circuit", "--p", "2", "--n", "2", "--name", "zero_query")
    path = tmp_path / "c.json"
    path.write_text(out)
    code, out, _ = run(capsys, "qofd", "--circuit", str(path))
    assert code == 0 and json.loads(out)["result"]["degree"] == 0


def test_lemma1_command(capsys):
    code, out, _ = run(capsys, "lemma1", "--p", "2", "--n", "4")
    res = json.loads(out)["result"]
    assert code == 0 and res["pass"] and res["lemma_bound"] == "n/4"
    assert res["per_degree"][0]["status"] == "infeasible"


def test_simulate_and_classical(capsys):
    code, out, _ = run(capsys, "simulate", "--p", "2", "--n", "2", "--kernel-dim", "1",
                       "--trials", "50")
    res = json.loads(out)["result"]
    assert code == 0 and res["success_rate"] == 1.0
    code, out, _ = run(capsys, "classical", "basis", "--matrix", str(DATA / "kernel_p_matrix.json"))
    rep = json.loads(out)
    assert rep["queries_used"] == 2
    code, out, _ = run(capsys, "classical", "collision", "--n", "6", "--shift", "000101",
                       "--budget", "64", "--trials", "3")
    rep = json.loads(out)
    assert rep["result"]["collision_rate"] == 1


def test_verify_counting(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "counting", "--p", "2", "--n", "2")
    res = json.loads(out)["result"]
    assert code == 0 and res["pass"]


@pytest.mark.parametrize("argv", [
    ("count", "--p", "4", "--n", "2"),
    ("count", "--p", "2", "--n", "0"),
    ("verify", "--suite", "counting", "--p", "2", "--n", "5", "--cap", "1000"),
])
def test_usage_and_cap_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and "error" in json.loads(err)


def test_cap_error_reports_size(capsys):
    code, _, err = run(capsys, "verify", "--suite", "counting", "--p", "2", "--n", "5",
                       "--cap", "1000")
    rep = json.loads(err)
    assert rep["size"] == 2 ** 25 and rep["cap"] == 1000


def test_seed_from_environment(capsys, monkeypatch):
    argv = ("simulate", "--p", "2", "--n", "3", "--kernel-dim", "0", "--trials", "20")
    monkeypatch.setenv("SIMONLAB_SEED", "5")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--seed", "5")
    assert a == b
