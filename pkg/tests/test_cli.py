from __future__ import annotations

import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

from powcomp.cli import frac_str, interval_json, main, parse_frac, shared_decimal
from powcomp.interval import Interval


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count_json(capsys):
    code, out, _ = run(capsys, "count", "--base", "2", "--upto", "10")
    assert code == 0
    env = json.loads(out)
    assert env["command"] == "count" and env["base"] == 2
    assert env["results"]["q"] == [1, 1, 3, 13, 75, 525, 4347, 41245, 441675, 5259885, 68958747]
    assert env["provenance"]["q"] == "exact"


def test_count_oracle_csv_with_trailing_format(capsys):
    code, out, _ = run(capsys, "count", "--base", "3", "--upto", "4", "--oracle", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert all(r["q"] == r["oracle"] for r in rows) and len(rows) == 5


def test_usage_errors(capsys):
    assert run(capsys, "count", "--base", "1", "--upto", "3")[0] == 1
    assert run(capsys, "count", "--base", "2")[0] == 1
    assert run(capsys, "nosuchcommand")[0] == 1
    code, _, err = run(capsys, "bounds", "--base", "2", "--n", "60", "--tail")
    assert code == 1 and "--radius" in err


def test_computation_failure_names_stage(capsys):
    code, _, err = run(capsys, "count", "--base", "4", "--upto", "6", "--oracle")
    assert code == 2 and "[oracle]" in err
    code, _, err = run(capsys, "bounds", "--base", "2", "--n", "4", "--tail", "--radius", "100")
    assert code == 2 and "[tail-bound]" in err


def test_series_round_trip(capsys):
    code, out, _ = run(capsys, "series", "--base", "2", "--order", "6", "--which", "S")
    env = json.loads(out)
    assert [F(c) for c in env["results"]["coeffs"]] == [1, 0, F(-5, 12), F(-1, 6), F(-1, 24), F(1, 45)]


def test_ws_and_maxreps(capsys):
    env = json.loads(run(capsys, "ws", "--base", "2", "--s", "1", "--n", "3")[1])
    assert env["results"]["W"] == "3" and env["results"]["W_over_nfact"] == "1/2"
    env = json.loads(run(capsys, "maxreps", "--base", "2", "--upto", "12")[1])
    assert env["results"]["all_bounds_hold"] is True


def test_bounds_output(capsys):
    env = json.loads(run(capsys, "bounds", "--base", "2", "--n", "60", "--refined", "--tail",
                         "--radius", "1", "--split", "86")[1])
    r = env["results"]
    assert F(r["refined"]["hi"]) <= F(6, 10**14)
    assert F(r["tail"]["hi"]) <= F(86, 10**15)
    assert F(r["tail"]["lo"]) <= F(r["tail"]["hi"])


def test_certify_json(capsys):
    code, out, _ = run(capsys, "certify", "--base", "2", "--timing")
    assert code == 0
    env = json.loads(out)
    rho = env["results"]["rho"]
    assert F(rho["lo"]) <= F(83845184342, 10**11) + F(1, 10**11) and F(rho["hi"]) >= F(83845184342, 10**11)
    assert rho["dec"].startswith("0.83845184342")
    assert env["results"]["zero_count_inside_R"] == 1
    assert env["provenance"]["rho"] == "certified-enclosure"
    assert "wall_time_s" in env


def test_dist_and_expand(capsys):
    env = json.loads(run(capsys, "dist", "--base", "2", "--m", "2", "--param", "largest")[1])
    assert env["results"]["pmf"] == {"2": "1"}
    code, out, _ = run(capsys, "expand", "--base", "2", "--terms", "3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["base"].startswith("1.1926743412134660322212889")
    assert rows[2]["base"].startswith("-0.51839777389933777286")


def test_tables_csv(capsys, tmp_path):
    target = tmp_path / "t.csv"
    code, out, _ = run(capsys, "tables", "--bases", "2..3", "--format", "csv", "--output", str(target))
    assert code == 0 and out == ""
    text = target.read_text()
    assert "# table1" in text and "# table3" in text
    line = [l for l in text.splitlines() if l.startswith("2,")][0]
    assert line.split(",")[1].startswith("0.29637204905")


def test_text_format(capsys):
    code, out, _ = run(capsys, "--format", "text", "constants", "--base", "2")
    assert code == 0 and "theta:" in out


def test_serialization_helpers():
    assert frac_str(F(3, 4)) == "3/4" and frac_str(F(5)) == "5"
    assert parse_frac("3/2") == F(3, 2)
    iv = Interval(F(1234561, 10**6), F(1234569, 10**6))
    assert shared_decimal(iv) == "1.23456"
    assert shared_decimal(Interval(F(-1), F(1))) == ""
    assert shared_decimal(Interval(F(-2, 3))).startswith("-0.6666")
    js = interval_json(iv)
    assert Interval(F(js["lo"]), F(js["hi"])) == iv


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "powcomp", "count", "--base", "2", "--upto", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["results"]["q"] == [1, 1, 3, 13]
