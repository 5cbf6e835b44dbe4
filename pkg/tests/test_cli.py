import io
import subprocess
import sys

import pytest

from timesym.cli import RunConfig, main, parse_sharing
from timesym.records import loads


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


def test_simulate_deterministic():
    a = run(["simulate", "--n", "2", "--seed", "7"])
    b = run(["simulate", "--n", "2", "--seed", "7"])
    assert a[0] == 0 and a == b


def test_simulate_structured_deterministic():
    a = run(["simulate", "--n", "4", "--seed", "3", "--output", "structured"])
    b = run(["simulate", "--n", "4", "--seed", "3", "--output", "structured"])
    assert a == b
    recs = loads(a[1])
    summary = recs[-1]
    assert summary["record"] == "simulation"
    assert summary["reading"] == summary["setting"]
    assert summary["oracle_queries"] == 3


def test_simulate_fixed_setting():
    code, text = run(["simulate", "--n", "2", "--setting", "10"])
    assert code == 0
    assert "setting 10  reading 10  oracle queries 1" in text


def test_simulate_standard_variant_can_miss():
    # Not certain, so no check is raised for the standard variant.
    code, _ = run(["simulate", "--n", "4", "--seed", "1", "--variant", "standard"])
    assert code == 0


def test_tables_output():
    code, text = run(["tables", "--n", "2", "--setting", "01", "--sharing", "left"])
    assert code == 0
    for title in ("Table I", "Table II", "Table III", "Table IV", "Table V"):
        assert title in text
    assert "|01>_B|01>_A" in text
    assert "(|01>_B + |11>_B)(|00>_A + |01>_A + |10>_A + |11>_A)" in text
    assert "|01>_B|01>_A + |11>_B|11>_A" in text
    assert "meas. of B_l" in text and "meas. of A_r" in text
    assert text.count("PASS") == 3


def test_verify_rule_row():
    code, text = run(["verify-rule", "--N", "4"])
    assert code == 0
    assert text.splitlines()[1].split() == ["4", "3", "1", "1", "1.0"]


def test_verify_rule_structured():
    code, text = run(["verify-rule", "--N", "4,16", "--output", "structured"])
    recs = loads(text)
    assert code == 0
    assert [r["N"] for r in recs] == [4, 16]


def test_sharings_command():
    code, text = run(["sharings", "--n", "2", "--setting", "11"])
    assert code == 0
    assert "support intersection {11}" in text
    assert "candidate space 4 -> 2" in text


def test_epr_command():
    for sep in ("identity", "phase"):
        code, text = run(["epr", "--separation", sep])
        assert code == 0
        assert "agreement probability 1.0" in text


@pytest.mark.parametrize("argv", [
    ["simulate", "--n", "9"],
    ["simulate", "--n", "0"],
    ["tables", "--n", "2", "--setting", "012"],
    ["tables", "--n", "2", "--setting", "0"],
    ["tables", "--n", "2", "--sharing", "0,1"],
    ["verify-rule", "--N", "12"],
    ["verify-rule", "--N", "four"],
    ["simulate", "--bogus"],
    ["frobnicate"],
    [],
])
def test_usage_errors(argv, capsys):
    code, _ = run(argv)
    assert code == 2
    assert capsys.readouterr().err


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig("simulate", 2, setting="111")
    with pytest.raises(ValueError):
        RunConfig("dance", 2)
    assert RunConfig("tables", 2, "01", "left").layout.N == 4


def test_parse_sharing():
    assert parse_sharing("left", 4).initial_bits == (0, 1)
    assert parse_sharing("right", 4).initial_bits == (2, 3)
    assert parse_sharing("1,3", 4).final_bits == (0, 2)
    with pytest.raises(ValueError):
        parse_sharing("a,b", 4)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "timesym", "verify-rule", "--N", "4"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "half-info" in proc.stdout


def test_failed_check_exits_1(monkeypatch, capsys):
    import dataclasses
    import timesym.cli as cli

    real = cli.verify_rule

    def broken(Ns, variant):
        return [dataclasses.replace(r, quantum_success=0.5) for r in real(Ns, variant)]

    monkeypatch.setattr(cli, "verify_rule", broken)
    code, _ = run(["verify-rule", "--N", "4"])
    assert code == 1
    assert "check failed: quantum_success N=4" in capsys.readouterr().err
