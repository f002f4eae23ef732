import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

from borcherds.cli import main

from conftest import data_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_example_document(tmp_path, capsys, example_doc):
    p = tmp_path / "doc.json"
    p.write_text(json.dumps(example_doc))
    code, out, _ = run(capsys, "validate", "--input", str(p))
    doc = json.loads(out)
    assert code == 0
    # [PAPER] three components with residues 0, 1/3, 1/3
    assert sorted(map(tuple, doc["components"])) == [(-1, 0), (0, 0), (1, 0)]
    assert doc["residues"] == {"[-1, 0]": "1/3", "[0, 0]": "0", "[1, 0]": "1/3"}


def test_validate_reports_required_precision(capsys):
    code, out, _ = run(capsys, "validate", "--input", "phi45", "-B", "8")
    doc = json.loads(out)
    assert code == 0 and doc["weyl"] == {"a": "4", "b": ["3", "2"], "c": "3"}
    # [DERIVED] same numbers the vvform tests derive by hand
    assert doc["a_neg"] == "64/3" and doc["required_D"] == "292/3"


def test_compute_csv_contains_table(tmp_path, capsys):
    out = tmp_path / "phi45_b7.csv"
    code, _, _ = run(capsys, "compute", "--input", "phi45", "-B", "7",
                     "--format", "csv", "--output", str(out))
    assert code == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["a", "b1", "b2", "c", "coefficient"]
    got = {tuple(map(int, r[:4])): int(r[4]) for r in rows[1:]}
    keys = [tuple(map(int, r[:4])) for r in rows[1:]]
    assert keys == sorted(keys)
    want = data_json("table2_expected.json")                           # [PAPER]
    for e in want["entries"]:
        assert got[tuple(e["index"])] == int(e["coeff"])


def test_output_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "x.json", tmp_path / "y.json"]
    for p in paths:
        assert run(capsys, "compute", "--input", "phi45", "-B", "6", "--output", str(p))[0] == 0
    a, b = (p.read_bytes() for p in paths)
    assert a == b
    doc = json.loads(a)
    assert "seconds" not in json.dumps(doc)


def test_naive_command_matches_compute(capsys):
    _, log, _ = run(capsys, "compute", "--input", "phi45", "-B", "6")
    _, naive, _ = run(capsys, "naive", "--input", "phi45", "-B", "6")
    assert json.loads(log)["coefficients"] == json.loads(naive)["coefficients"]


def test_bench_agrees(tmp_path, capsys):
    out = tmp_path / "bench.json"
    code, _, _ = run(capsys, "bench", "--input", "phi45", "-B", "5..7", "--output", str(out))
    doc = json.loads(out.read_text())
    assert code == 0 and doc["agree"]
    assert [r["B"] for r in doc["rows"]] == [5, 6, 7]
    assert all(r["equal"] for r in doc["rows"])
    # [PAPER] table counts
    assert [r["count"] for r in doc["rows"]] == [1011, 2353, 4627]


def test_restrict(capsys):
    code, out, _ = run(capsys, "restrict", "--input", "phi45", "-B", "6", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,coefficient" and lines[1:] == ["%d,0" % n for n in range(6)]


def test_restrict_delta9_trace_bounded(capsys):
    code, out, _ = run(capsys, "restrict", "--input", "delta9", "-B", "11", "--trace-bound", "11")
    series = json.loads(out)["restriction"]
    # [DERIVED] -Delta^9 = -q^9 + 216 q^10 + ...
    assert code == 0 and series["9"] == "-1" and series["10"] == "216"
    assert all(series[str(n)] == "0" for n in range(9))


def test_convert_tuple_layout(tmp_path, capsys):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"(0, 0)": {"0": 1, "1": 2}, "(1, 0)": {"1/3": 4},
                             "(-1, 0)": {"1/3": 4}}))
    code, out, _ = run(capsys, "convert", "--input", str(p))
    assert code == 0
    doc = json.loads(out)
    assert sorted(tuple(c["key"]) for c in doc["components"]) == [(-1, 0), (0, 0), (1, 0)]


# exit codes

def test_validation_failure_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"(2, 3)": {"0": 1}}))
    code, _, err = run(capsys, "convert", "--input", str(p), "--json-errors")
    assert code == 1 and json.loads(err)["error"] == "validation"
    code, _, err = run(capsys, "compute", "--input", str(tmp_path / "missing.json"))
    assert code == 1 and "cannot read" in err
    assert run(capsys, "compute", "--input", "phi45", "-B", "0")[0] == 1


def test_insufficient_precision_exit_2(tmp_path, capsys):
    raw = data_json("phi45_input.json")
    raw["precision"] = "1"
    for comp in raw["components"]:
        comp["terms"] = [t for t in comp["terms"] if Fraction(t["exp"]) <= 1]
    p = tmp_path / "short.json"
    p.write_text(json.dumps(raw))
    code, _, err = run(capsys, "compute", "--input", str(p), "-B", "7", "--json-errors")
    doc = json.loads(err)
    assert code == 2 and doc["error"] == "insufficient-precision" and "required_D" in doc
    code, _, err = run(capsys, "compute", "--input", str(p), "-B", "7")
    assert code == 2 and "required D" in err


def test_threads_env_fallback(monkeypatch, capsys):
    monkeypatch.setenv("BORCHERDS_THREADS", "3")
    assert run(capsys, "compute", "--input", "phi45", "-B", "3", "--threads", "2")[0] == 0
    assert run(capsys, "compute", "--input", "phi45", "-B", "3")[0] == 0


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "borcherds", "validate", "--input", "delta9"],
                       capture_output=True, text=True, check=True)
    assert json.loads(p.stdout)["d_min"] == data_json("delta9_input.json")["d_min"]
