import csv
import json
from pathlib import Path

import pytest

from selfsnn.harness import cli
from selfsnn.harness.config import ConfigError, ExperimentConfig, coerce, parse_set
from selfsnn.harness.registry import LEVELS, REGISTRY, get_experiment, list_experiments
from selfsnn.harness.runner import (
    RESULTS_CSV_HEADER,
    SUMMARY_KEYS,
    export_results,
    run_experiment,
    run_many,
    summary_text,
)

GOLDEN = Path(__file__).parent / "golden"


# ---------------------------------------------------------------- registry


def test_registry_contents():
    assert len(REGISTRY) >= 10
    assert all(e.level in LEVELS for e in REGISTRY.values())
    assert {e.level for e in REGISTRY.values()} == set(LEVELS)
    names = [e["name"] for e in list_experiments()]
    assert names == sorted(names) == sorted(REGISTRY)


def test_unknown_experiment():
    with pytest.raises(KeyError):
        get_experiment("telepathy")
    with pytest.raises(KeyError):
        ExperimentConfig("telepathy")


# ---------------------------------------------------------------- config


def test_overrides_are_typed():
    cfg = ExperimentConfig("mirror-test", 1, {"trials": "20", "noise": "0.1"})
    assert cfg.params["trials"] == 20 and cfg.params["noise"] == 0.1
    assert ExperimentConfig("false-belief", 0, {"with_tom": "false"}).params["with_tom"] is False


@pytest.mark.parametrize("key,value", [("trials", "many"), ("trials", "2.5"), ("noise", "nan"), ("bogus", "1")])
def test_invalid_override(key, value):
    with pytest.raises(ConfigError):
        ExperimentConfig("mirror-test", 0, {key: value})


def test_coerce_and_parse_set():
    assert coerce("k", "yes", True) is True
    with pytest.raises(ConfigError):
        coerce("k", "maybe", True)
    assert parse_set(["a=1", "b=x=y"]) == {"a": "1", "b": "x=y"}
    with pytest.raises(ConfigError):
        parse_set(["novalue"])
    with pytest.raises(ConfigError):
        parse_set(["=3"])


def test_invalid_seed():
    with pytest.raises(ConfigError):
        ExperimentConfig("lif-oracle", -1)


def test_hash_depends_on_content_only():
    a = ExperimentConfig("mirror-test", 3, {"trials": "50"}, out="x")
    b = ExperimentConfig("mirror-test", 3, {"trials": 50}, out="y")
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != ExperimentConfig("mirror-test", 4, {"trials": 50}).config_hash()
    # spelling out a default equals leaving it out
    assert ExperimentConfig("mirror-test", 3, {"agents": 3}).config_hash() == ExperimentConfig("mirror-test", 3).config_hash()


def test_yaml_then_cli_overrides(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("seed: 9\nparams:\n  trials: 30\n  noise: 0.05\n")
    cfg = ExperimentConfig.build("mirror-test", None, ["trials=40"], str(path))
    assert cfg.seed == 9
    assert cfg.params["trials"] == 40 and cfg.params["noise"] == 0.05
    assert ExperimentConfig.build("mirror-test", 2, [], str(path)).seed == 2


def test_yaml_errors(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("seeds: 1\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.build("mirror-test", config_file=str(bad))
    other = tmp_path / "other.yaml"
    other.write_text("experiment: empathy\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.build("mirror-test", config_file=str(other))


# ---------------------------------------------------------------- runner


def test_summary_schema_and_determinism():
    cfg = ExperimentConfig("mirror-test", 42)
    text = summary_text(cfg)
    assert text == summary_text(cfg)
    data = json.loads(text)
    assert tuple(sorted(data)) == SUMMARY_KEYS
    assert data["config_hash"] == cfg.config_hash()
    assert data["passed"] is True


def test_run_writes_files(tmp_path):
    res = run_experiment(ExperimentConfig("lif-oracle", 42, out=str(tmp_path)))
    run_dir = tmp_path / "lif-oracle-42"
    assert res.run_dir == run_dir and res.passed
    assert {p.name for p in run_dir.iterdir()} == {"summary.json", "timing.json", "draws.csv"}
    assert "wall_clock_s" in json.loads((run_dir / "timing.json").read_text())


def test_golden_summary_and_series(tmp_path):
    run_experiment(ExperimentConfig("lif-oracle", 42, out=str(tmp_path)))
    run_dir = tmp_path / "lif-oracle-42"
    assert (run_dir / "summary.json").read_text() == (GOLDEN / "lif-oracle-42.summary.json").read_text()
    assert (run_dir / "draws.csv").read_text() == (GOLDEN / "lif-oracle-42.draws.csv").read_text()


def test_run_many_pool_matches_serial():
    configs = [ExperimentConfig(n, 5) for n in ("lif-oracle", "hazard-warning", "empathy", "false-belief")]
    assert run_many(configs, workers=1) == run_many(configs, workers=2)


# ---------------------------------------------------------------- export


def _two_runs(root):
    run_experiment(ExperimentConfig("lif-oracle", 42, out=str(root)))
    run_experiment(ExperimentConfig("false-belief", 42, out=str(root)))


def test_export_golden(tmp_path):
    _two_runs(tmp_path)
    csv_path = export_results(tmp_path, "csv")
    json_path = export_results(tmp_path, "json")
    assert csv_path.read_text() == (GOLDEN / "results.csv").read_text()
    assert json_path.read_text() == (GOLDEN / "results.json").read_text()
    with open(csv_path) as fh:
        assert tuple(next(csv.reader(fh))) == RESULTS_CSV_HEADER


def test_reexport_identical(tmp_path):
    _two_runs(tmp_path)
    first = export_results(tmp_path, "csv").read_text()
    assert export_results(tmp_path, "csv").read_text() == first


def test_export_empty_dir(tmp_path):
    assert json.loads(export_results(tmp_path, "json").read_text()) == []
    lines = export_results(tmp_path, "csv").read_text().splitlines()
    assert lines == [",".join(RESULTS_CSV_HEADER)]


def test_export_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        export_results(tmp_path / "missing")
    with pytest.raises(ValueError):
        export_results(tmp_path, "xml")


# ---------------------------------------------------------------- cli


def test_cli_list_golden(capsys):
    assert cli.main(["list"]) == 0
    assert capsys.readouterr().out == (GOLDEN / "list.txt").read_text()


def test_cli_run_pass(tmp_path, capsys):
    assert cli.main(["run", "hazard-warning", "--seed", "1", "--out", str(tmp_path)]) == 0
    assert "PASS  warnings_correct" in capsys.readouterr().out


def test_cli_run_failing_check(tmp_path, capsys):
    # heavy visual noise swamps the self-prediction
    code = cli.main(["run", "mirror-test", "--set", "noise=5.0", "--set", "trials=20", "--out", str(tmp_path)])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["run", "telepathy"],
    ["run", "mirror-test", "--set", "trials=lots"],
    ["run", "mirror-test", "--set", "colour=red"],
    ["run", "mirror-test", "--config", "/nonexistent.yaml"],
    ["export", "/nonexistent-dir"],
])
def test_cli_usage_errors(argv, tmp_path, capsys):
    assert cli.main(argv + (["--out", str(tmp_path)] if argv[0] == "run" else [])) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_argparse_errors():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_cli_export(tmp_path, capsys):
    _two_runs(tmp_path)
    assert cli.main(["export", str(tmp_path), "--format", "csv"]) == 0
    assert capsys.readouterr().out.strip().endswith("results.csv")
