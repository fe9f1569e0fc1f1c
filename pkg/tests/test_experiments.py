"""Experiment plumbing: configs, caching, reports, and the CLI."""

import csv
import json
import os
from pathlib import Path

import pytest

from uncle_forge.cli import main
from uncle_forge.experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    ExperimentResult,
    resolve_out_dir,
    run,
    write_result,
)


def test_config_defaults_fill_in():
    cfg = ExperimentConfig(experiment="ghz-gap").resolved()
    assert cfg.sizes == tuple(range(4, 15))
    assert cfg.seed == 7
    # explicit values survive resolution
    cfg2 = ExperimentConfig(experiment="ghz-gap", sizes=(6, 8)).resolved()
    assert cfg2.sizes == (6, 8)
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="warp-drive").resolved()


def test_digest_tracks_science_only(tmp_path):
    a = ExperimentConfig(experiment="density", sizes=(8,))
    b = ExperimentConfig(experiment="density", sizes=(8,),
                         out_dir=str(tmp_path), quiet=True, force=True)
    c = ExperimentConfig(experiment="density", sizes=(8, 10))
    assert a.digest() == b.digest()
    assert a.digest() != c.digest()


def test_run_caches_and_is_reproducible(tmp_path):
    cfg = ExperimentConfig(experiment="density", sizes=(6,),
                           out_dir=str(tmp_path))
    res1, path1, cached1 = run(cfg)
    blob1 = path1.read_bytes()
    res2, path2, cached2 = run(cfg)
    assert (cached1, cached2) == (False, True)
    assert path1 == path2
    assert path2.read_bytes() == blob1
    assert res2.checks == res1.checks
    # force recomputes but lands on identical science
    res3, path3, cached3 = run(ExperimentConfig(
        experiment="density", sizes=(6,), out_dir=str(tmp_path), force=True))
    assert not cached3
    doc1 = json.loads(blob1)
    doc3 = json.loads(path3.read_text())
    assert doc3["records"] == doc1["records"]
    assert doc3["checks"] == doc1["checks"]


def test_write_result_csv_columns(tmp_path):
    res = ExperimentResult(
        "density", {"seed": 1}, [{"a": 1, "b": 2.5}, {"b": 1.0, "c": "x"}],
        {"ok": True}, 0.1)
    write_result(res, tmp_path, "cafe")
    with open(tmp_path / "density-cafe.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0].keys()) == {"a", "b", "c"}
    assert rows[0]["a"] == "1" and rows[1]["a"] == ""
    doc = json.loads((tmp_path / "density-cafe.json").read_text())
    assert doc["passed"] is True


def test_out_dir_resolution(tmp_path, monkeypatch):
    monkeypatch.setenv("UNCLE_FORGE_OUT", str(tmp_path / "env"))
    assert resolve_out_dir(ExperimentConfig("density")) == tmp_path / "env"
    explicit = ExperimentConfig("density", out_dir=str(tmp_path / "flag"))
    assert resolve_out_dir(explicit) == tmp_path / "flag"
    assert (tmp_path / "env").is_dir()


def test_experiment_registry_is_complete():
    assert set(EXPERIMENTS) == {
        "ghz-gap", "density", "epsilon-limit", "toric-ground",
        "phi-sweep", "prop1", "additivity"}


def test_cli_pass_exit_and_report(tmp_path, capsys):
    code = main(["density", "--sizes", "6", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "density: PASS" in out
    assert "[ok]" in out


def test_cli_json_output(tmp_path, capsys):
    code = main(["density", "--sizes", "6", "--out", str(tmp_path), "--json"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["experiment"] == "density"
    assert doc["passed"] is True


def test_cli_failed_check_exits_2(tmp_path, capsys):
    # plant a cached report with a failing check; the CLI must surface it
    cfg = ExperimentConfig(experiment="density", sizes=(6,),
                           out_dir=str(tmp_path)).resolved()
    doc = {
        "experiment": "density", "version": "0", "config": cfg.science_dict(),
        "records": [], "checks": {"spacings_shrink": False}, "passed": False,
        "wall_time_s": 0.0,
    }
    path = Path(tmp_path) / f"density-{cfg.digest()}.json"
    path.write_text(json.dumps(doc))
    code = main(["density", "--sizes", "6", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 2
    assert "FAIL" in out


def test_cli_error_exits_1(tmp_path, capsys):
    code = main(["additivity", "--sizes", "8", "--out", str(tmp_path)])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_cli_config_file(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"sizes": [6], "seed": 11}))
    code = main(["density", "--config", str(cfg_path),
                 "--out", str(tmp_path)])
    assert code == 0
    produced = [p for p in os.listdir(tmp_path) if p.endswith(".json")
                and p != "cfg.json"]
    doc = json.loads((tmp_path / produced[0]).read_text())
    assert doc["config"]["seed"] == 11
    assert doc["config"]["sizes"] == [6]
    # CLI flags override the file
    code = main(["density", "--config", str(cfg_path), "--seed", "12",
                 "--out", str(tmp_path)])
    assert code == 0
    docs = [json.loads((tmp_path / p).read_text())
            for p in os.listdir(tmp_path)
            if p.endswith(".json") and p != "cfg.json"]
    assert {d["config"]["seed"] for d in docs} == {11, 12}


def test_cli_rejects_unknown_config_fields(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"sizes": [6], "fuzz": 3}))
    code = main(["density", "--config", str(cfg_path), "--out", str(tmp_path)])
    assert code == 1
    assert "fuzz" in capsys.readouterr().err
