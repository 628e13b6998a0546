import csv
import io
import json
import subprocess
import sys

import pytest

from chyp.cli import main

ORIGIN = '{"z":[[0,0]],"zlast":[0,1]}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_eisenstein_example(capsys):
    code, out, _ = run(capsys, "eval", "eisenstein", "--n", "1", "--s", "2", "--mu", "0", "--Z", ORIGIN, "--box", "1")
    doc = json.loads(out)
    assert code == 0 and doc["value_re"] == 2.5 and doc["value_im"] == 0.0
    assert doc["provenance"]["config"]["truncation"]["N"] == 1


def test_eval_poisson_example(capsys):
    code, out, _ = run(capsys, "eval", "poisson", "--Z", ORIGIN, "--zeta", "0")
    assert code == 0 and json.loads(out)["value_re"] == pytest.approx(1.0, rel=1e-15)


def test_eval_jinv_example(capsys):
    code, out, _ = run(capsys, "eval", "jinv", "--n", "1", "--m", "1", "--Z", ORIGIN, "--box", "500")
    assert code == 0 and json.loads(out)["value_re"] == pytest.approx(1728, rel=1e-2)


def test_eval_specfun(capsys):
    code, out, _ = run(capsys, "eval", "specfun.gauss_2f1", "--args", "1,1,2,0.5")
    assert code == 0 and json.loads(out)["value_re"] == pytest.approx(2 * 0.6931471805599453, rel=1e-14)


def test_jinv_command(capsys):
    Z = '{"z":[[0.1,0.05],[0,0.2]],"zlast":[0.2,1.4]}'
    code, out, _ = run(capsys, "jinv", "--n", "2", "--m", "3/2", "--Z", Z, "--box", "60")
    doc = json.loads(out)
    assert code == 0
    assert {"value_re", "value_im", "box", "checks"} <= set(doc) and doc["box"] == 60 and doc["m"] == "3/2"
    assert all(c["pass"] for c in doc["checks"])


def test_precondition_exit_code(capsys):
    code, out, err = run(capsys, "eval", "eisenstein", "--s", "2", "--Z", ORIGIN, "--box", "0")
    assert code == 2 and out == "" and "--box" in err


def test_missing_argument_is_named(capsys):
    code, _, err = run(capsys, "eval", "poisson", "--Z", ORIGIN)
    assert code == 2 and "--zeta" in err


def test_dimension_mismatch(capsys):
    code, _, err = run(capsys, "eval", "poisson", "--n", "2", "--Z", ORIGIN, "--zeta", "0")
    assert code == 2


def test_numeric_failure_exit_code(capsys):
    code, _, err = run(capsys, "eval", "specfun.gauss_2f1", "--args", "1,1,2,0.9999999999")
    assert code == 3 and "did not converge" in err


def test_verify_exit_code_reflects_failures(capsys):
    code, out, _ = run(capsys, "verify", "modular", "--n", "1", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    failed = [r["check"] for r in rows if r["pass"] == "false"]
    assert code == (1 if failed else 0)
    assert {r["check"] for r in rows} >= {"inversion-identity", "degenerate-j", "word-cocycle"}
    assert all(r["paper_ref"] for r in rows)


def test_verify_byte_reproducible(capsys):
    args = ("verify", "modular", "--n", "1", "--seed", "11")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_eval_csv(capsys):
    code, out, _ = run(capsys, "eval", "eisenstein", "--s", "2", "--Z", ORIGIN, "--box", "1", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows == [["quantity", "value_re", "value_im"], ["eisenstein", "2.5", "0.0"]]


def test_table_box_sweep_monotone(capsys):
    code, out, _ = run(capsys, "table", "eisenstein", "--s", "2", "--Z", ORIGIN,
                       "--sweep", "box=1,2,4,8", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    vals = [float(r["value_re"]) for r in rows]
    assert code == 0 and [r["box"] for r in rows] == ["1", "2", "4", "8"]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_table_index_sweep_constant(capsys):
    Z = '{"z":[[0,0]],"zlast":[0.1,1.3]}'
    code, out, _ = run(capsys, "table", "jinv", "--Z", Z, "--box", "100", "--sweep", "m=1,3/2,7")
    vals = [r["value_re"] for r in json.loads(out)["rows"]]
    assert code == 0 and len(set(vals)) == 1


def test_table_bad_sweep(capsys):
    code, _, _ = run(capsys, "table", "eisenstein", "--s", "2", "--Z", ORIGIN, "--sweep", "colour=1,2")
    assert code == 2


def test_out_file(tmp_path, capsys):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "eval", "poisson", "--Z", ORIGIN, "--zeta", "0", "--out", str(dest))
    assert code == 0 and out == "" and json.loads(dest.read_text())["quantity"] == "poisson"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chyp", "eval", "eisenstein", "--s", "2", "--Z", ORIGIN,
                           "--box", "1", "--format", "csv"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.splitlines()[1] == "eisenstein,2.5,0.0"
