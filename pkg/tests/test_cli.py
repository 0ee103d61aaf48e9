import json
from pathlib import Path

import pytest

from pinchsim.harness.cli import cli
from pinchsim.harness.csvio import read_csv
from pinchsim.presets import scenario_preset
from pinchsim.scenario import save_scenario, scenario_to_dict
from pinchsim.search import format_duration


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    save_scenario(scenario_preset("b"), path)
    return path


class TestValidateCommand:
    def test_valid_config_exits_zero(self, scenario_file, tmp_path):
        assert cli(["validate", "--config", str(scenario_file), "--out", str(tmp_path / "o")]) == 0

    def test_broken_config_exits_one_and_lists_violations(self, tmp_path, capsys):
        doc = scenario_to_dict(scenario_preset("b"))
        doc["waveguides"][0]["grid_size"] = 0
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        code = cli(["validate", "--config", str(path), "--out", str(tmp_path / "o")])
        assert code == 1
        assert "grid_size" in capsys.readouterr().out

    def test_unparseable_config_exits_one(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text('{"surprise": 1}')
        assert cli(["validate", "--config", str(path), "--out", str(tmp_path / "o")]) == 1


class TestBenchmarkCommand:
    def test_counts_match_published_table(self, tmp_path):
        out = tmp_path / "bench"
        assert cli(["benchmark", "--out", str(out)]) == 0
        rows = read_csv(out / "complexity.csv")
        evals = {
            (r["method"], r["N"], r["K"]): int(r["evaluations"]) for r in rows
        }
        assert evals[("brute_force", "20", "6")] == 64_000_000
        assert evals[("brute_force", "30", "4")] == 810_000
        assert evals[("brute_force", "30", "8")] == 656_100_000_000
        assert evals[("coordinate_grid", "20", "6")] == 360
        assert evals[("deep_learning", "", "")] == 1

    def test_time_estimates_round_like_the_table(self, tmp_path):
        out = tmp_path / "bench"
        cli(["benchmark", "--out", str(out)])
        rows = read_csv(out / "complexity.csv")
        rendered = {r["method"] + r["N"]: format_duration(float(r["est_time_seconds"])) for r in rows}
        assert rendered["brute_force20"] == "17.8 h"
        assert rendered["brute_force30"] in ("13.5 min", "20.8 yr")  # two N=30 rows
        assert rendered["coordinate_grid20"] == "0.36 s"
        assert rendered["deep_learning"] == "1 ms"


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self):
        assert cli(["frobnicate"]) == 1

    def test_no_subcommand_prints_usage(self):
        assert cli([]) == 1

    def test_missing_config_is_config_error(self, tmp_path):
        assert cli(["simulate", "--out", str(tmp_path / "o")]) == 1


class TestManifest:
    def test_manifest_written_and_finalized(self, scenario_file, tmp_path):
        out = tmp_path / "run"
        cli(["simulate", "--config", str(scenario_file), "--out", str(out)])
        doc = json.loads((out / "manifest.json").read_text())
        assert doc["command"] == "simulate"
        assert doc["status"] == "ok"
        assert doc["finished_at"] is not None
        assert "rates.csv" in doc["outputs"]

    def test_failed_run_recorded(self, tmp_path):
        out = tmp_path / "run"
        cli(["simulate", "--config", "/nonexistent.json", "--out", str(out)])
        doc = json.loads((out / "manifest.json").read_text())
        assert doc["status"] == "config_error"


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv,artifact",
        [
            (["benchmark"], "complexity.csv"),
            (["simulate", "--scenario", "b"], "rates.csv"),
            (["optimize", "--scenario", "b", "--method", "grid"], "search.csv"),
            (["fl", "--rounds", "2"], "fl.csv"),
            (["aircomp"], "aircomp.csv"),
            (["hotspot", "--slots", "3"], "hotspot.csv"),
            (["mobility", "--ticks", "5"], "mobility.csv"),
            (["train", "--scenario", "b", "--episodes", "3"], "learning_curve.csv"),
        ],
    )
    def test_identical_runs_are_byte_identical(self, tmp_path, argv, artifact):
        outs = []
        for name in ("first", "second"):
            out = tmp_path / name
            assert cli(argv + ["--seed", "7", "--out", str(out)]) == 0
            outs.append((out / artifact).read_bytes())
        assert outs[0] == outs[1]


class TestTrainCommand:
    def test_scenario_a_writes_checkpoint_and_curve(self, tmp_path):
        out = tmp_path / "train_a"
        assert cli(["train", "--scenario", "a", "--instances", "40", "--out", str(out), "--seed", "1"]) == 0
        rows = read_csv(out / "learning_curve.csv")
        assert len(rows) == 1
        assert float(rows[0]["oracle_ratio"]) > 0.5
        assert (out / "model.json").exists()

    def test_scenario_d_emits_monotone_trace(self, tmp_path):
        out = tmp_path / "train_d"
        assert cli(["train", "--scenario", "d", "--out", str(out)]) == 0
        rows = read_csv(out / "learning_curve.csv")
        values = [float(r["mean_reward"]) for r in rows]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
