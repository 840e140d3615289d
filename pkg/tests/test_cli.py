import json
import shutil
import subprocess
import sys

import pytest

from geodfs.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_symbolic_main(capsys):
    code, out, _ = call(capsys, "verify", "--identity", "main", "--n-max", "8", "--mode", "symbolic")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "pass" and rep["n_range"] == [1, 8]
    assert rep["elapsed_ms"] is None


def test_verify_all_numeric(capsys):
    code, out, _ = call(capsys, "verify", "--identity", "all", "--n-max", "6", "--mode", "numeric", "--seed", "3", "--points", "4")
    assert code == 0
    reps = json.loads(out)
    assert len(reps) == 6 and all(r["verdict"] == "consistent" for r in reps)


def test_verify_timing_flag(capsys):
    code, out, _ = call(capsys, "verify", "--identity", "thm22", "--n-max", "4", "--timing")
    assert code == 0 and json.loads(out)["elapsed_ms"] >= 0


def test_numeric_verify_needs_a_seed(capsys):
    code, _, err = call(capsys, "verify", "--identity", "main", "--n-max", "4", "--mode", "numeric")
    assert code == 2 and "--seed" in err


def test_symbolic_cap_is_a_resource_error(capsys):
    code, _, err = call(capsys, "verify", "--identity", "main", "--n-max", "12")
    assert code == 3 and "resource" in err


def test_eval_examples(capsys):
    code, out, _ = call(capsys, "eval", "--family", "G", "--n", "2", "--at", "w=1,x=1,z=1")
    assert code == 0 and json.loads(out)["value"] == "1/4"
    code, out, _ = call(capsys, "eval", "--family", "HatG", "--n", "1", "--at", "w=-1,x=0,z=0")
    assert json.loads(out)["value"] == "1/2"
    code, out, _ = call(capsys, "eval", "--family", "F", "--n", "3", "--k", "2", "--symbolic")
    fn = json.loads(out)["function"]
    assert fn["numerator"] == "1" and len(fn["denominator"]) == 5


def test_eval_pole_and_usage(capsys):
    code, out, _ = call(capsys, "eval", "--family", "HatG", "--n", "1", "--at", "w=1,x=0,z=0")
    assert code == 1 and json.loads(out)["error"] == "pole"
    assert call(capsys, "eval", "--family", "F", "--n", "3", "--k", "3", "--at", "w=1,x=1,z=1")[0] == 2
    assert call(capsys, "eval", "--family", "G", "--n", "2", "--at", "w=0.5,x=1,z=1")[0] == 2
    assert call(capsys, "eval", "--family", "G", "--n", "2")[0] == 2


def test_simulate_is_byte_identical(capsys):
    argv = ("simulate", "--n", "9", "--p", "1/2", "--samples", "1000", "--seed", "7")
    code1, out1, _ = call(capsys, *argv)
    code2, out2, _ = call(capsys, *argv)
    assert code1 == code2 == 0 and out1 == out2
    assert out1.startswith("L,F,B,C,T,count\n")
    assert sum(int(line.rsplit(",", 1)[1]) for line in out1.splitlines()[1:]) == 1000


def test_simulate_usage_errors(capsys):
    base = ["simulate", "--n", "3", "--samples", "10"]
    assert call(capsys, *base, "--p", "0.5", "--seed", "1")[0] == 2
    assert call(capsys, *base, "--p", "1", "--seed", "1")[0] == 2
    assert call(capsys, *base, "--p", "1/2")[0] == 2
    assert call(capsys, *base, "--p", "1/2", "--seed", "x")[0] == 2


def test_compare_round_trip(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path, seed in ((a, 1), (b, 2)):
        code, out, _ = call(capsys, "simulate", "--n", "5", "--p", "1/2", "--samples", "12000", "--seed", str(seed), "--out", str(path))
        assert code == 0 and json.loads(out)["samples"] == 12000
    code, out, _ = call(capsys, "compare", "--in", str(a), str(b), "--tests", "mean,fb,ft")
    rep = json.loads(out)
    tests = [r["test"] for r in rep["reports"]]
    assert tests == ["paired_mean_F_minus_B", "paired_mean_F_minus_B", "chi_square_F_vs_B", "chi_square_F_vs_T_control"]
    assert rep["reports"][-1]["decision"] == "reject" and rep["reports"][-1]["expected"] == "reject"
    assert code == (0 if rep["verdict"] == "pass" else 1)
    again = call(capsys, "compare", "--in", str(a), str(b), "--tests", "mean,fb,ft")[1]
    assert again == out


def test_compare_usage_errors(tmp_path, capsys):
    a = tmp_path / "a.csv"
    call(capsys, "simulate", "--n", "3", "--p", "1/2", "--samples", "1000", "--seed", "1", "--out", str(a))
    assert call(capsys, "compare", "--in", str(a), "--tests", "fb")[0] == 2
    assert call(capsys, "compare", "--in", str(a), "--tests", "bogus")[0] == 2
    assert call(capsys, "compare", "--in", str(tmp_path / "missing.csv"))[0] == 2
    assert call(capsys, "compare", "--in", str(a), str(a), "--tests", "fb")[0] == 2


@pytest.mark.skipif(shutil.which("geodfs") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(
        ["geodfs", "eval", "--family", "StdG", "--n", "2", "--at", "w=1,x=1,z=1"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == "1/4"
    proc = subprocess.run([sys.executable, "-m", "geodfs.cli", "verify"], capture_output=True, text=True)
    assert proc.returncode == 2
