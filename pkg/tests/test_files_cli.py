import json
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given

from ikplab.cli import cmd_solve, main
from ikplab.core import evaluate, make_instance, Schedule
from ikplab.files import InstanceFile, ParseError, parse_number, parse_rational, read_instance, write_instance
from conftest import instances


def test_parse_rational():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational(5) == 5
    for bad in ("0.5", 0.5, True, "x", "1/0"):
        with pytest.raises(ParseError):
            parse_rational(bad)
    assert parse_number("0.01") == Fraction(1, 100)


@given(instances())
def test_round_trip(inst):
    f = InstanceFile(inst, {"name": "x"})
    back = InstanceFile.loads(f.dumps())
    assert back.instance == inst and back.metadata == {"name": "x"}
    assert back.dumps() == f.dumps()


def test_rational_entries_round_trip(tmp_path):
    inst = make_instance(["299/100", 1], [Fraction(149, 50), 1], [3, 4], [1, Fraction(1, 3)])
    path = tmp_path / "i.json"
    write_instance(path, inst)
    data = json.loads(path.read_text())
    assert data["profits"] == ["299/100", 1] and data["multipliers"] == [1, "1/3"]
    assert read_instance(path).instance == inst


def test_bad_files(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ParseError):
        read_instance(p)
    p.write_text(json.dumps({"profits": [1], "weights": [1]}))
    with pytest.raises(ParseError):
        read_instance(p)
    p.write_text(json.dumps({"profits": [0.5], "weights": [1], "capacities": [1]}))
    with pytest.raises(ParseError):
        read_instance(p)


@pytest.fixture
def astar_file(tmp_path):
    path = tmp_path / "astar.json"
    assert main(["generate", "--family", "astar", "--deltas", "1,1,1", "--out", str(path)]) == 0
    return path


def test_generate_astar(astar_file):
    inst = read_instance(astar_file).instance
    assert inst.n == 6 and inst.capacities == (2, 3, 6)


def test_solve(astar_file, capsys):
    assert main(["solve", str(astar_file), "--alg", "astar", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"][0]["value"] == 6
    assert main(["solve", str(astar_file), "--alg", "exact", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["results"][0]["value"] == 11
    assert main(["solve", str(astar_file), "--alg", "h1"]) == 0
    assert "h1" in capsys.readouterr().out


def test_reports_are_self_consistent(astar_file):
    inst = read_instance(astar_file).instance
    for alg in ("exact", "astar", "a", "aprime", "ptas", "h1", "h2", "h2b"):
        rep = cmd_solve(astar_file, alg, with_oracle=True)
        row = rep.results[0]
        assert evaluate(inst, Schedule(row["schedule"])) == row["value"]
        if rep.oracle:
            assert rep.oracle["value"] == 11


def test_solve_errors(tmp_path, astar_file, capsys):
    assert main(["solve", str(tmp_path / "missing.json"), "--alg", "exact"]) != 0
    assert main(["solve", str(astar_file), "--alg", "ht2"]) != 0
    assert "NotTwoPeriods" in capsys.readouterr().err


def test_generate_is_deterministic(capsys):
    args = ["generate", "--family", "random", "--seed", "7", "--n", "6", "--T", "3"]
    main(args)
    first = capsys.readouterr().out
    main(args)
    assert capsys.readouterr().out == first
    assert json.loads(first)["metadata"]["parameters"]["seed"] == 7


def test_generate_ht2(capsys):
    main(["generate", "--family", "ht2", "--d1", "1", "--d2", "1", "--gamma", "0.01"])
    inst = InstanceFile.loads(capsys.readouterr().out).instance
    assert inst.capacities == (Fraction(301, 100), 4)
    assert inst.weights[2] == Fraction(101, 100)


def test_verify_commands(capsys):
    assert main(["verify", "duality-astar", "--deltas", "1,1,1", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verified"] and out["report"]["gap"] == 0
    assert main(["verify", "duality-ht2", "--dr", "70711/100000"]) == 0
    assert main(["verify", "guarantees", "--random", "--n", "6", "--t", "2",
                 "--count", "10", "--seed", "1"]) == 0
    assert main(["verify", "ratio-sweep", "--family", "backward", "--alg", "h2b",
                 "--sweep", "T=10,20", "--reference", "closed-form"]) == 0
    capsys.readouterr()


def test_verify_rejects_decimal(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "duality-ht2", "--dr", "0.70710678"])
    assert info.value.code != 0
    assert "ParseError" in capsys.readouterr().err


def test_bench(capsys):
    assert main(["bench", "--count", "3", "--n", "6", "--T", "2", "--json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert {r["algorithm"] for r in rows} == {"astar", "a", "h1", "h2", "ht2"}


def test_budget_env(astar_file, monkeypatch, capsys):
    monkeypatch.setenv("IKP_LAB_BUDGET", "1")
    assert main(["solve", str(astar_file), "--alg", "exact"]) == 3
    assert "budget" in capsys.readouterr().err


def test_module_entry_point(astar_file):
    out = subprocess.run([sys.executable, "-m", "ikplab.cli", "solve", str(astar_file),
                          "--alg", "astar", "--json"], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["results"][0]["value"] == 6
