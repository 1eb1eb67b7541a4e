import json
import subprocess
import sys

import pytest

from freightquota import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def prices(tmp_path):
    p = tmp_path / "prices.csv"
    p.write_text("id,price\n1,10\n2,9\n3,12\n4,6\n", encoding="utf-8")
    return p


@pytest.fixture
def example(tmp_path):
    p = tmp_path / "example.csv"
    p.write_text("# capacity=100\nid,D,S,c,g,beta\n1,40,10,1,0,0\n2,30,9,1,0,0\n3,50,12,1,0,0\n4,50,6,1,0,0\n",
                 encoding="utf-8")
    return p


def test_group_table(capsys):
    code, out, _ = run(capsys, "group", "canadian.csv")
    assert code == 0
    assert "Barley" in out and "80,897,829" in out and "G2" in out


def test_group_machine_with_quotas(capsys, tmp_path):
    q = tmp_path / "q.csv"
    q.write_text("Oat,275577827\n", encoding="utf-8")
    code, out, _ = run(capsys, "group", "canadian_scenario2.csv", "--quotas", str(q), "--format", "machine")
    assert code == 0
    doc = json.loads(out)
    assert [s["quantity"] for s in doc["suppliers"]] == [128_185_505, 246_236_668, 0, 275_577_827]
    assert doc["optimal_prices"]["Crude Oil"] == pytest.approx(0.0942)


def test_group_table_with_quotas_shows_both_groupings(capsys, tmp_path):
    q = tmp_path / "q.csv"
    q.write_text("Oat,275577827\n", encoding="utf-8")
    code, out, _ = run(capsys, "group", "canadian_scenario2.csv", "--quotas", str(q))
    assert code == 0
    assert "Original group" in out and "New group" in out


def test_allocate(capsys, example, prices):
    code, out, _ = run(capsys, "allocate", str(example), "--prices", str(prices))
    assert code == 0
    assert "trace: 3:C2 -> 1:C2 -> 2:C5" in out
    code, out, _ = run(capsys, "--format", "machine", "allocate", str(example), "--prices", str(prices))
    doc = json.loads(out)
    assert doc["quantities"] == {"1": 40, "2": 10, "3": 50, "4": 0}
    assert doc["transporter_profit"] == 40 * 9 + 10 * 8 + 50 * 11


def test_equilibrium(capsys):
    code, out, _ = run(capsys, "equilibrium", "--ell", "0.5,0.5,0.5", "--format", "machine")
    assert code == 0
    assert json.loads(out)["cdf"] == pytest.approx([0.70710678] * 3, abs=1e-8)
    code, out, _ = run(capsys, "equilibrium", "--ell", "0.9,0.4,0.4")
    assert code == 0 and "0.42163702" in out


def test_equilibrium_errors(capsys):
    assert run(capsys, "equilibrium", "--ell", "0.9,0.1,0.9")[0] == 3
    assert run(capsys, "equilibrium", "--ell", "a,b")[0] == 2


def test_regulate(capsys):
    code, out, _ = run(capsys, "regulate", "canadian_scenario2.csv", "--format", "machine")
    assert code == 0
    doc = json.loads(out)
    assert doc["quotas"]["Oat"] == 275_577_827
    code, out, _ = run(capsys, "regulate", "canadian_scenario2.csv", "--cap", "0.2", "--grid", "11")
    assert code == 0 and "55,115,565" in out


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "canadian.csv", "--from", "0", "--to", "1.5e9", "--steps", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "T,pi_s,regime"
    assert [line.rsplit(",", 1)[1] for line in lines[1:5]] == ["A1", "A2", "A3", "A5"]
    assert lines[-1] == "# breakpoints=128185505.0;569102171.0;1010026695.0;1285604522.0"


def test_flags_accepted_before_and_after_command(capsys):
    a = run(capsys, "--tie", "seed:3", "--format", "machine", "group", "canadian.csv")
    b = run(capsys, "group", "canadian.csv", "--tie", "seed:3", "--format", "machine")
    assert a == b and a[0] == 0


def test_tolerance_flag_merges_near_ties(capsys, tmp_path):
    p = tmp_path / "tie.csv"
    p.write_text("# capacity=1\nid,D,S,c,g,beta\na,1,1.0,0,0,0\nb,1,1.001,0,0,0\n", encoding="utf-8")
    _, out, _ = run(capsys, "group", str(p), "--format", "machine")
    assert json.loads(out)["groups"]["G1"] == ["b"]
    _, out, _ = run(capsys, "group", str(p), "--format", "machine", "--tolerance", "0.01")
    assert json.loads(out)["groups"]["G1"] == ["a"]


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("# capacity=1\nid,D,S,c,g,beta\na,-1,1,1,1,0\n", encoding="utf-8")
    code, _, err = run(capsys, "group", str(bad))
    assert code == 2 and "negative production" in err
    assert run(capsys, "group", str(tmp_path / "missing.csv"))[0] == 2
    q = tmp_path / "q.csv"
    q.write_text("Oat,999999999999\n", encoding="utf-8")
    assert run(capsys, "group", "canadian.csv", "--quotas", str(q))[0] == 3
    assert run(capsys, "sweep", "canadian.csv", "--from", "0", "--to", "1", "--steps", "0")[0] == 3


def test_invariant_violation_exit_code(capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise cli.InvariantViolation("boom")

    monkeypatch.setattr(cli, "check_grouping", broken)
    code, _, err = run(capsys, "group", "canadian.csv")
    assert code == 4 and "boom" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "freightquota.cli", "group", "canadian.csv", "--format", "machine"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["groups"]["G2"] == ["Barley"]
