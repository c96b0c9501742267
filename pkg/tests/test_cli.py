import csv
import json
import shutil
import subprocess
import sys

import pytest

from toricheights.cli import main
from toricheights.io import load_problem, parse_range
from toricheights.verifier import CSV_COLUMNS

LINES = json.dumps({"dim": 2, "polynomials": ["1 + x + y", "1 + x + y"], "divisors": ["cube"]})


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_parse_range():
    assert parse_range("101..401") == (101, 401)
    with pytest.raises(ValueError):
        parse_range("5-7")
    with pytest.raises(ValueError):
        parse_range("9..7")


def test_load_problem_fills_canonical_divisors(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"polynomials": ["1 + x + y", "1 + x/2 + y"]}))
    prob = load_problem(path)
    assert prob.dim == 2 and len(prob.divisors) == 1
    assert prob.divisors[0].label == "canonical"


def test_degree(capsys):
    assert main(["degree", "--problem", LINES]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_predict_writes_report(tmp_path):
    out = tmp_path / "pred.json"
    assert main(["predict", "--problem", LINES, "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["places"] == ["inf"]
    assert rep["error"] <= 0.01
    assert abs(rep["total"] - 0.8526) <= rep["error"] + 1e-3


def test_verify_writes_csv_and_summary(tmp_path):
    out = tmp_path / "rows.csv"
    assert main(["verify", "--problem", LINES, "--primes", "11..17", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == list(CSV_COLUMNS)
    assert [int(r["N"]) for r in rows] == [11, 13, 17]
    summary = json.loads((tmp_path / "rows.csv.summary.json").read_text())
    assert summary["tail_orders"] == [11, 13, 17]


def test_tail_exit_code_and_rows(tmp_path):
    out = tmp_path / "tail.csv"
    assert main(["tail", "--problem", LINES, "--primes", "5..13", "--prime-bound", "20", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert [int(r["N"]) for r in rows] == [5, 7, 11, 13]
    assert all(r["status"] == "ok" for r in rows)


def test_equidist_for_one_variable(capsys):
    prob = json.dumps({"dim": 1, "polynomials": ["x - 2"]})
    assert main(["equidist", "--problem", prob, "--primes", "5..11"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 4


@pytest.mark.skipif(shutil.which("toricheights") is None, reason="console script not installed")
def test_console_script_help():
    res = subprocess.run(["toricheights", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("predict", "verify", "tail", "equidist", "degree"):
        assert cmd in res.stdout


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "toricheights.cli", "degree", "--problem", LINES],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "1"
