"""CLI front-end tests."""

import json

import pytest

from snapfwd.cli import main


def test_run_clean_passes(capsys):
    rc = main(["run", "--n", "4", "--profile", "CLEAN", "--seed", "1",
               "--horizon", "2000", "--rate", "0.05", "--json"])
    out = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert out["verdict"]["status"] == "PASS"


def test_run_full_profile_passes(capsys):
    rc = main(["run", "--n", "5", "--profile", "FULL", "--seed", "42",
               "--horizon", "4000", "--rate", "0.05"])
    assert rc == 0
    assert capsys.readouterr().out.startswith("PASS")


def test_usage_errors():
    assert main(["run", "--n", "1"]) == 3
    assert main(["run", "--horizon", "0"]) == 3
    assert main(["bogus"]) == 3
    assert main([]) == 3


def test_config_file_and_override(tmp_path, capsys):
    cfgf = tmp_path / "c.json"
    cfgf.write_text(json.dumps({"n": 3, "profile": "CLEAN", "horizon": 800,
                                "workload": {"rate": 0.1}}))
    rc = main(["run", "--config", str(cfgf), "--seed", "3", "--json"])
    out = json.loads(capsys.readouterr().out)
    assert rc == 0 and out["n"] == 3

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"unknown_key": 1}))
    assert main(["run", "--config", str(bad)]) == 3


def test_trace_and_replay_reproduce(tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    rc = main(["run", "--n", "4", "--profile", "FULL", "--seed", "7",
               "--horizon", "1500", "--rate", "0.05",
               "--trace", str(trace), "--json"])
    first = json.loads(capsys.readouterr().out)
    assert rc == 0
    lines = trace.read_text().splitlines()
    assert json.loads(lines[0])["n"] == 4  # initial configuration first

    rc = main(["run", "--n", "4", "--profile", "FULL", "--seed", "7",
               "--horizon", "1500", "--rate", "0.05",
               "--replay", str(trace), "--json"])
    second = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert second["verdict"] == first["verdict"]
    assert second["steps"] == first["steps"]


def test_fuzz_aggregates_and_exit_code(tmp_path, capsys):
    rc = main(["fuzz", "--n", "3", "--profile", "FULL", "--strategy", "SYNC",
               "--runs", "5", "--horizon", "3000", "--rate", "0.05",
               "--fail-file", str(tmp_path / "fails.json"), "--json"])
    out = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert out["counts"]["FAIL"] == 0
    assert out["runs"] == 5
    assert not (tmp_path / "fails.json").exists()


def test_explore_exits_clean(capsys):
    rc = main(["explore", "--n", "2", "--profile", "CLEAN", "--json"])
    out = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert out["violations"] == [] and out["exhausted"]
