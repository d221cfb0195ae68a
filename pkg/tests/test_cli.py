import csv
import io
import json

import pytest

from bdlrpc.cli import main, parse_range, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _csv_body(text):
    return list(csv.DictReader(io.StringIO("".join(l for l in text.splitlines(True) if not l.startswith("#")))))


def test_parse_range():
    assert parse_range("1..5") == [1, 2, 3, 4, 5]
    assert parse_range("3") == [3]
    for bad in ("5..1", "a..b", "-1..2", ""):
        with pytest.raises(UsageError):
            parse_range(bad)


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--q", "2", "--n", "32", "--k", "16", "--d", "5", "--r-range", "1..5",
                       "--no-timestamp")
    assert code == 0
    rows = _csv_body(out)
    assert [(r["P_1"], r["B_2"], r["P_r(d-1)"]) for r in rows] == [
        ("0.99953", "0.99991", "0.99995"),
        ("0.98447", "0.99982", "0.99986"),
        ("0.57759", "0.99957", "0.99968"),
        ("0.00000", "0.99536", "0.99931"),
        ("0.00000", "0.74854", "0.99858"),
    ]
    assert "# d=5" in out and "generated_at" not in out


def test_table_conventions(capsys):
    _, out, _ = run(capsys, "table", "--q", "2", "--n", "32", "--k", "16", "--d", "5", "--r-range", "0..0")
    assert _csv_body(out) == [{"r": "0", "P_1": "1.00000", "B_2": "1.00000", "P_r(d-1)": "1.00000"}]
    assert "generated_at" in out
    _, out, _ = run(capsys, "table", "--q", "2", "--n", "32", "--k", "16", "--d", "1", "--r", "2")
    row = _csv_body(out)[0]
    assert row["B_2"] == row["P_r(d-1)"] == "domain-violation"


def test_usage_errors(capsys):
    assert run(capsys, "table", "--q", "2", "--n", "32", "--k", "16", "--d", "5", "--r-range", "5..1")[0] == 2
    assert run(capsys, "table", "--q", "2", "--n", "32", "--k", "16", "--r", "1")[0] == 2
    assert run(capsys, "bounds", "--q", "4", "--n", "32", "--k", "16", "--d", "2", "--t", "2", "--r", "1")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    code, _, err = run(capsys, "simulate", "--q", "2", "--m", "37", "--n", "32", "--k", "16", "--d", "2",
                       "--t", "2", "--r", "10", "--trials", "2")
    assert code == 2 and "radius" in err


def test_bounds_json(capsys):
    code, out, _ = run(capsys, "bounds", "--q", "2", "--n", "32", "--k", "16", "--d", "5", "--t", "2", "--r", "2",
                       "--format", "json", "--no-timestamp")
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["r"] == 2 and doc["config"]["m"] is None
    assert f"{doc['report']['b_lower']['value']:.5f}" == "0.99982"
    assert doc["report"]["b_lower"]["argmin_j"] == 2


def test_bounds_csv(capsys):
    code, out, _ = run(capsys, "bounds", "--q", "2", "--m", "37", "--n", "32", "--k", "16", "--d", "2", "--t", "2",
                       "--r-range", "1..3")
    rows = _csv_body(out)
    assert code == 0 and len(rows) == 3 and float(rows[2]["d_new"]) > float(rows[0]["d_new"])


def test_curve(capsys, tmp_path):
    path = tmp_path / "curve.csv"
    code, out, _ = run(capsys, "curve", "--q", "2", "--m", "37", "--n", "32", "--k", "16", "--d", "2", "--t", "2",
                       "--r-range", "0..10", "--out", str(path), "--no-timestamp")
    assert code == 0 and out == ""
    rows = _csv_body(path.read_text())
    assert len(rows) == 11
    assert rows[0]["d_new"] == rows[0]["d_fl"] == rows[0]["d_g"] == "0.0"
    assert rows[10]["status"].startswith("out-of-radius") and "d_new" in rows[10]["status"]
    assert rows[5]["status"] == "ok"
    assert float(rows[3]["p_t_log10c"]) < -3


def test_curve_json_has_raw(capsys):
    _, out, _ = run(capsys, "curve", "--q", "2", "--m", "37", "--n", "32", "--k", "16", "--d", "2", "--t", "2",
                    "--r-range", "9..10", "--format", "json")
    rows = json.loads(out)["rows"]
    assert rows[1]["d_new_raw"] > 1 and rows[1]["d_new"] == 1.0


def test_simulate_deterministic(capsys, monkeypatch):
    args = ["simulate", "--q", "2", "--m", "23", "--n", "16", "--k", "8", "--d", "2", "--t", "2", "--r", "2",
            "--trials", "40", "--no-timestamp"]
    monkeypatch.setenv("BDLRPC_SEED", "42")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args, "--seed", "42")
    assert first == second
    assert "# seed=42" in first
    row = _csv_body(first)[0]
    assert int(row["successes"]) <= 40 and float(row["bound"]) > 0.9


def test_simulate_json_diagnose(capsys):
    code, out, _ = run(capsys, "simulate", "--q", "2", "--m", "23", "--n", "16", "--k", "8", "--d", "2", "--t", "2",
                       "--r", "2", "--trials", "20", "--diagnose", "--format", "json", "--seed", "1")
    run_doc = json.loads(out)["runs"][0]
    assert code == 0 and run_doc["diagnostics"]["cond_both"] <= 20
    assert "success_lower_bound" in run_doc


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0 and "FAIL" not in out


def test_selftest_failure_exit_code(capsys, monkeypatch):
    import bdlrpc.cli as cli

    monkeypatch.setattr(cli, "run_selftest", lambda: [("broken", False, "forced")])
    assert run(capsys, "selftest")[0] == 3


def test_runtime_error_exit_code(capsys, monkeypatch):
    import bdlrpc.cli as cli

    def boom(*a, **k):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "curve_rows", boom)
    assert run(capsys, "curve", "--q", "2", "--m", "37", "--n", "32", "--k", "16", "--d", "2", "--t", "2",
               "--r", "1")[0] == 1
