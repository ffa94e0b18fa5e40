import json
import random
import subprocess
import sys
from fractions import Fraction

import pytest

from prscore import ALL_SCHEMES
from prscore.cli import main

from conftest import D1_COUNTS, FIXTURES


@pytest.fixture
def d1_csv(tmp_path):
    path = tmp_path / "d1.csv"
    path.write_text("".join(f"{c}\n" for c in D1_COUNTS))
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_score_selected_schemes(capsys, d1_csv):
    code, out, _ = run(capsys, "score", "--input", d1_csv, "--scheme", "ws,lb")
    assert code == 0
    lines = out.splitlines()
    assert "| WS | 10 | 191/10 | 191/100 | 1.9100 |" in lines
    assert "| LB | 10 | 17 | 17/10 | 1.7000 |" in lines
    assert out.index("| WS") < out.index("| LB")


def test_score_all_in_canonical_order(capsys, d1_csv):
    code, out, _ = run(capsys, "score", "--input", d1_csv, "--out", "csv")
    assert code == 0
    names = [line.split(",")[0] for line in out.splitlines()[1:]]
    assert names == [str(s) for s in ALL_SCHEMES]


def test_score_json(capsys, d1_csv):
    code, out, _ = run(capsys, "score", "--input", d1_csv, "--out", "json", "--scheme", "AW_CEIL")
    assert code == 0
    (rep,) = json.loads(out)["reports"]
    assert rep["scheme"] == "AW_CEIL" and rep["r"] == "9/5"


def test_top10_classes_match_brute_force(capsys, tmp_path):
    rng = random.Random(7)
    counts = [int(rng.paretovariate(1.2)) for _ in range(537)]
    path = tmp_path / "d.csv"
    path.write_text("".join(f"{c}\n" for c in counts))
    code, out, _ = run(capsys, "score", "--input", path, "--classes", FIXTURES / "top10.json",
                       "--scheme", "lb,r,ws", "--out", "json")
    assert code == 0
    r = {rep["scheme"]: Fraction(rep["r"]) for rep in json.loads(out)["reports"]}
    n = len(counts)
    # LB: papers whose strictly-lower count reaches 90% of n; R: papers whose <= count exceeds it
    lb = sum(1 for c in counts if Fraction(sum(x < c for x in counts), n) >= Fraction(9, 10))
    rr = sum(1 for c in counts if Fraction(sum(x <= c for x in counts), n) > Fraction(9, 10))
    assert r["LB"] == Fraction(lb, n)
    assert r["R"] == Fraction(rr, n)
    assert r["WS"] == Fraction(1, 10)


def test_frequency_input(capsys, tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("0,2\n1,4\n2,1\n3,1\n4,1\n5,1\n")
    code, out, _ = run(capsys, "score", "--input", path, "--format", "frequency", "--scheme", "r")
    assert code == 0 and "12/5" in out


def test_table_from_summary(capsys):
    code, out, _ = run(capsys, "table", "--summary", FIXTURES / "table1.json", "--scheme", "ws")
    assert code == 0
    assert "| Contribution to R(6) (WS) |  | 50.00 | 50.00 | 45.00 | 20.00 | 20.00 | 6.00 | 191.00 |" in out


def test_table_output_is_byte_deterministic(tmp_path):
    paths = [tmp_path / f"out{i}.md" for i in range(2)]
    for p in paths:
        assert main(["table", "--summary", str(FIXTURES / "table2.json"), "--output", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_table3_requires_lenient(capsys):
    code, _, err = run(capsys, "table", "--summary", FIXTURES / "table3.json")
    assert code == 3 and "row k=5" in err
    code, out, _ = run(capsys, "table", "--summary", FIXTURES / "table3.json", "--lenient")
    assert code == 0 and "| No. pubs. above threshold | 2695 |" in out


def test_reconstruct_then_validate(capsys, tmp_path):
    data = tmp_path / "t4.csv"
    code, _, _ = run(capsys, "reconstruct", "--summary", FIXTURES / "table4.json", "--output", data)
    assert code == 0
    code, out, _ = run(capsys, "validate", "--input", data, "--summary", FIXTURES / "table4.json")
    assert code == 0
    assert out.startswith("ok: n=7552") and "summary round-trip" in out


def test_reconstruct_frequency_format(capsys):
    code, out, _ = run(capsys, "reconstruct", "--summary", FIXTURES / "table1.json", "--format", "frequency")
    assert code == 0
    assert out.splitlines()[0] == "0,477"


def test_validate_summary_mismatch(capsys, d1_csv):
    code, _, err = run(capsys, "validate", "--input", d1_csv, "--summary", FIXTURES / "table1.json")
    assert code == 3 and "mismatch" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "score", "--input", tmp_path / "nope.csv")
    assert code == 2 and "cannot read" in err


def test_missing_input(capsys):
    code, _, err = run(capsys, "validate")
    assert code == 2 and "--input" in err


def test_malformed_line(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1\n2\nthree\n")
    code, _, err = run(capsys, "score", "--input", path)
    assert code == 2 and "line 3" in err


def test_negative_count_is_invariant_violation(capsys, tmp_path):
    path = tmp_path / "neg.csv"
    path.write_text("1\n-2\n")
    code, _, err = run(capsys, "validate", "--input", path)
    assert code == 3 and "line 2" in err


def test_infeasible_gap(capsys, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({
        "n": 8, "bottom": {"citations": 4, "count": 1},
        "rows": [
            {"p": "1/8", "citations": 4, "below": 0, "at": 1},
            {"p": "1", "citations": 5, "below": 6, "at": 2},
        ],
    }))
    code, _, err = run(capsys, "reconstruct", "--summary", path)
    assert code == 3 and "infeasible gap" in err


def test_unknown_scheme(capsys, d1_csv):
    code, _, err = run(capsys, "score", "--input", d1_csv, "--scheme", "nope")
    assert code == 2


def test_negative_round(capsys, d1_csv):
    code, _, _ = run(capsys, "score", "--input", d1_csv, "--round", "-1")
    assert code == 2


def test_round_option(capsys, d1_csv):
    code, out, _ = run(capsys, "score", "--input", d1_csv, "--scheme", "ws", "--round", "0")
    assert code == 0 and "| 1.91 |" in out


def test_module_entry_point(d1_csv):
    proc = subprocess.run(
        [sys.executable, "-m", "prscore", "score", "--input", str(d1_csv), "--scheme", "ws"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "191/100" in proc.stdout


def test_help_lists_commands():
    proc = subprocess.run([sys.executable, "-m", "prscore", "--help"], capture_output=True, text=True)
    for name in ("score", "table", "reconstruct", "validate"):
        assert name in proc.stdout
    assert proc.returncode == 0
