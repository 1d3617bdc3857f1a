import json
import subprocess
import sys

import pytest

from multipart_ekr.cli import main
from multipart_ekr.core import dumps_family, loads_family


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_verify_round_trip(tmp_path, capsys):
    path = tmp_path / "ce.json"
    code, _, _ = run(capsys, "construct", "hm-ts", "--n", "5,5", "--k", "2,2", "--t", "1", "--S", "2", "-o", str(path))
    assert code == 0
    text = path.read_text().strip()
    assert dumps_family(loads_family(text)) == text
    code, out, _ = run(capsys, "verify", str(path), "--json")
    info = json.loads(out)
    assert code == 0
    assert (info["size"], info["class"], info["shifted"], info["projection_lemma"]) == (35, "nontrivial", True, True)
    # stdout construct gives the same canonical bytes as the file
    code, out, _ = run(capsys, "construct", "hm-ts", "--n", "5,5", "--k", "2,2", "--t", "1", "--S", "2")
    assert out.strip() == text


def test_verify_examples(tmp_path, capsys):
    hm = tmp_path / "hm.json"
    star = tmp_path / "star.json"
    run(capsys, "construct", "hm", "--n", "5", "--k", "2", "-o", str(hm))
    run(capsys, "construct", "star", "--n", "5", "--k", "2", "-o", str(star))
    code, out, _ = run(capsys, "verify", str(hm))
    assert code == 0 and out.startswith("size 3, nontrivial, shifted=true")
    code, out, _ = run(capsys, "verify", str(star))
    assert code == 0 and "trivial" in out and "nontrivial" not in out


@pytest.mark.parametrize("text", ["{bad", '{"parts": [{"n": 5, "k": 2}], "sets": [[[1, 9]]]}', "[]"])
def test_verify_bad_input_exit_2(tmp_path, capsys, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    code, _, err = run(capsys, "verify", str(path))
    assert code == 2 and err.startswith("error:")


def test_missing_file_exit_2(tmp_path, capsys):
    code, _, _ = run(capsys, "verify", str(tmp_path / "nope.json"))
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["search", "--n", "5,x", "--k", "2"],
    ["search", "--n", "5", "--k", "6"],
    ["formula", "--n", "5,5", "--k", "2,2", "--t", "1", "--ell", "1,0"],
    ["construct", "hm-ts", "--n", "4,4", "--k", "1,1", "--t", "1"],
    ["shift", "-", "--t", "1", "--i", "2", "--j", "1"],
    ["bogus"],
])
def test_invalid_parameters_exit_2(capsys, monkeypatch, argv):
    monkeypatch.setattr(sys, "stdin", __import__("io").StringIO('{"parts":[{"n":5,"k":2}],"sets":[[[1,2]]]}'))
    assert run(capsys, *argv)[0] == 2


def test_formula_outputs(capsys):
    code, out, _ = run(capsys, "formula", "--n", "5,5", "--k", "2,2", "--json", "--table")
    d = json.loads(out)
    assert code == 0
    assert d["m_max"] == 35 and d["frankl_bound"] == 40
    assert d["maximisers"] == [{"t": 1, "S": [2]}, {"t": 2, "S": [1]}]
    assert len(d["pairs"]) == 4
    code, out, _ = run(capsys, "formula", "--n", "5,5", "--k", "2,2", "--t", "1", "--ell", "2,1")
    assert out.strip().endswith("= 32")
    code, out, _ = run(capsys, "formula", "--n", "60", "--k", "30")
    # full decimal, no scientific notation
    assert "59132290782430712" in out and "e+" not in out


def test_shift_and_closure(tmp_path, capsys):
    path = tmp_path / "f.json"
    path.write_text('{"parts":[{"n":5,"k":2}],"sets":[[[2,3]],[[2,4]],[[3,4]]]}')
    code, out, _ = run(capsys, "shift", str(path), "--t", "1", "--i", "1", "--j", "2")
    assert code == 0 and loads_family(out).as_lists() == [[[1, 3]], [[1, 4]], [[3, 4]]]
    code, out, err = run(capsys, "closure", str(path), "--nontrivial")
    assert code == 0 and "Q=[1]" in err
    assert loads_family(out).as_lists() == [[[1, 2]], [[1, 3]], [[2, 3]]]
    code, out, _ = run(capsys, "closure", str(path))
    assert len(loads_family(out)) == 3


def test_search_json(capsys):
    code, out, _ = run(capsys, "search", "--n", "3,3,3", "--k", "1,1,1", "--json", "--witness")
    d = json.loads(out)
    assert code == 0
    assert (d["size"], d["status"], d["matches_m_max"]) == (7, "optimal", True)
    assert len(d["witness"]["sets"]) == 7
    code, out, _ = run(capsys, "search", "--n", "2,2", "--k", "1,1", "--json")
    assert json.loads(out)["status"] == "infeasible"


def test_search_verify(capsys):
    code, out, _ = run(capsys, "search", "--n", "3,3,3", "--k", "1,1,1", "--verify", "--json")
    d = json.loads(out)
    assert code == 0 and d["ok"] and d["oracle_ok"]


def test_reproduce_k1(capsys):
    code, out, _ = run(capsys, "reproduce", "k1-table", "--p", "3", "--n-max", "4", "--json")
    d = json.loads(out)
    assert code == 0 and d["ok"]
    assert [(c["computed"], c["status"]) for c in d["claims"]] == [(4, "pass"), (7, "pass"), (10, "pass")]


def test_reproduce_failure_flips_exit_code(capsys, monkeypatch):
    import multipart_ekr.reproduce as rp

    monkeypatch.setattr(rp, "k1_formula", lambda n, p: -1)
    code, out, _ = run(capsys, "reproduce", "k1-table", "--p", "3", "--n-max", "3")
    assert code == 1 and "FAIL" in out


def test_reproduce_counterexample_and_identities(capsys):
    code, out, _ = run(capsys, "reproduce", "counterexample")
    assert code == 0 and "PASS" in out and "recorded" in out
    code, out, _ = run(capsys, "reproduce", "identities")
    assert code == 0


def test_selftest(capsys):
    assert run(capsys, "selftest")[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "multipart_ekr", "formula", "--n", "5", "--k", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "Frankl bound 4" in proc.stdout
