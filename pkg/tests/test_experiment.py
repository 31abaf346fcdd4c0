import json
import os
import numpy as np
import pandas as pd
import pytest
from sample_path_causality.cli.main import EXIT_CHECK, EXIT_CONFIG, EXIT_ERROR, EXIT_OK, main
from sample_path_causality.config import load_experiment_config
from sample_path_causality.core import experiment
from sample_path_causality.core.estimator import run_trace
from sample_path_causality.core.experiment import ExperimentRunner
from sample_path_causality.utils.io_utils import read_sequences

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
APP_CONFIG = os.path.join(ROOT, "conf", "app.yml")
EXAMPLE1_CONFIG = os.path.join(ROOT, "conf", "example1.yml")


def small_config(tmp_path, n: int = 150, extra: str = "") -> str:
    path = tmp_path / f"small_{n}.yml"
    path.write_text(f"experiment:\n  n: {n}\n  seed: 1\n{extra}", encoding="utf-8")
    return str(path)


def read_json(path: str):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


class TestSimulateCommand:
    def test_default_config_rows_and_regimes(self, out_dir):
        assert main(["simulate", "--config", APP_CONFIG, "--out", out_dir]) == EXIT_OK
        frame = pd.read_csv(os.path.join(out_dir, "sequences.csv"))
        assert len(frame) == 2000
        assert frame.loc[frame["i"] == 999, "regime"].item() == 1
        assert frame.loc[frame["i"] == 1000, "regime"].item() == 2
        manifest = read_json(os.path.join(out_dir, "manifest_simulate.json"))
        assert manifest["seed"] == 0
        assert manifest["params"]["change_point"] == 1000
        assert "sequences.csv" in manifest["files"]

    def test_byte_identical(self, tmp_path):
        config = small_config(tmp_path)
        for name in ("a", "b"):
            assert main(["simulate", "--config", config, "--out", str(tmp_path / name)]) == EXIT_OK
        with open(tmp_path / "a" / "sequences.csv", "rb") as a, open(tmp_path / "b" / "sequences.csv", "rb") as b:
            assert a.read() == b.read()

    def test_seed_flag(self, tmp_path):
        config = small_config(tmp_path)
        main(["simulate", "--config", config, "--out", str(tmp_path / "a"), "--seed", "1"])
        main(["simulate", "--config", config, "--out", str(tmp_path / "b"), "--seed", "2"])
        a = read_sequences(str(tmp_path / "a" / "sequences.csv"))
        b = read_sequences(str(tmp_path / "b" / "sequences.csv"))
        assert not np.array_equal(a["x"], b["x"])

    def test_zero_horizon_is_config_error(self, tmp_path, out_dir):
        assert main(["simulate", "--config", small_config(tmp_path, n=0), "--out", out_dir]) == EXIT_CONFIG

    def test_unknown_key_is_config_error(self, tmp_path, out_dir):
        path = tmp_path / "bad.yml"
        path.write_text("experiment:\n  steps: 3\n")
        assert main(["simulate", "--config", str(path), "--out", out_dir]) == EXIT_CONFIG


class TestEstimateCommand:
    def test_round_trip_matches_in_memory_run(self, tmp_path, out_dir):
        config = load_experiment_config(small_config(tmp_path), {"output.out_dir": out_dir})
        runner = ExperimentRunner(config)
        x, y, _ = runner.simulate()
        result = runner.estimate(os.path.join(out_dir, "sequences.csv"))
        assert np.array_equal(result.x, x)
        assert np.array_equal(result.directions["yx"].estimate.measure, run_trace(x, y).measure)
        assert np.array_equal(result.directions["xy"].estimate.measure, run_trace(x, y, direction="xy").measure)

    def test_trace_files(self, tmp_path, out_dir):
        config = small_config(tmp_path)
        assert main(["simulate", "--config", config, "--out", out_dir]) == EXIT_OK
        assert main(["estimate", "--config", config, "--out", out_dir,
                     "--input", os.path.join(out_dir, "sequences.csv")]) == EXIT_OK
        for direction in ("yx", "xy"):
            frame = pd.read_csv(os.path.join(out_dir, f"trace_{direction}.csv"))
            assert len(frame) == 150
            assert (frame["C_hat"] >= 0).all() and np.isfinite(frame["C_hat"]).all()
            assert (frame["C_true"] >= 0).all() and (frame["C_star"] >= 0).all()

    def test_direction_and_format_flags(self, tmp_path, out_dir):
        assert main(["estimate", "--config", small_config(tmp_path), "--out", out_dir,
                     "--direction", "xy", "--format", "json", "--filter", "paper-literal"]) == EXIT_OK
        assert os.path.exists(os.path.join(out_dir, "trace_xy.json"))
        assert not os.path.exists(os.path.join(out_dir, "trace_yx.json"))

    def test_prefix_rows(self, tmp_path):
        stationary = "process:\n  change_point: null\n  regime2: null\n"
        long_config = small_config(tmp_path, n=400, extra=stationary)
        short_config = small_config(tmp_path, n=100, extra=stationary)
        assert main(["estimate", "--config", long_config, "--out", str(tmp_path / "long")]) == EXIT_OK
        assert main(["estimate", "--config", short_config, "--out", str(tmp_path / "short")]) == EXIT_OK
        with open(tmp_path / "long" / "trace_yx.csv") as f:
            long_lines = f.read().splitlines()
        with open(tmp_path / "short" / "trace_yx.csv") as f:
            short_lines = f.read().splitlines()
        assert long_lines[:101] == short_lines

    def test_malformed_input(self, tmp_path, out_dir):
        path = tmp_path / "seq.csv"
        path.write_text("x,y\n0,1\n1,2.5\n")
        assert main(["estimate", "--config", small_config(tmp_path), "--out", out_dir,
                     "--input", str(path)]) == EXIT_ERROR


class TestEvaluateCommand:
    def test_trace_against_itself(self, tmp_path, out_dir):
        config = small_config(tmp_path)
        main(["estimate", "--config", config, "--out", out_dir, "--direction", "yx"])
        trace = os.path.join(out_dir, "trace_yx.csv")
        assert main(["evaluate", "--config", config, "--out", out_dir,
                     "--trace", f"yx={trace}", "--reference", trace]) == EXIT_OK
        assert read_json(os.path.join(out_dir, "report_yx.json"))["causality_regret"] == 0.0

    def test_report_from_trace_columns(self, tmp_path, out_dir):
        config = small_config(tmp_path)
        main(["estimate", "--config", config, "--out", out_dir])
        assert main(["evaluate", "--config", config, "--out", out_dir,
                     "--trace", os.path.join(out_dir, "trace_yx.csv"),
                     "--trace", "xy=" + os.path.join(out_dir, "trace_xy.csv")]) == EXIT_OK
        for direction in ("yx", "xy"):
            report = read_json(os.path.join(out_dir, f"report_{direction}.json"))
            assert report["n"] == 150
            assert report["within_envelope"]
            assert report["satisfied"] is (True if report["applicable"] else None)
            assert report["causality_regret"] <= report["theorem_bound"]

    def test_impoverished_reference(self, tmp_path, out_dir):
        config = small_config(tmp_path, extra="reference:\n  family: grid\n  grid_points: [0.01]\n")
        main(["estimate", "--config", config, "--out", out_dir, "--direction", "yx"])
        assert main(["evaluate", "--config", config, "--out", out_dir,
                     "--trace", os.path.join(out_dir, "trace_yx.csv")]) == EXIT_OK
        report = read_json(os.path.join(out_dir, "report_yx.json"))
        assert not report["assumption2"]["holds"]
        assert not report["applicable"]
        assert report["satisfied"] is None

    def test_length_mismatch(self, tmp_path, out_dir):
        main(["estimate", "--config", small_config(tmp_path, n=150), "--out", str(tmp_path / "a")])
        main(["estimate", "--config", small_config(tmp_path, n=100), "--out", str(tmp_path / "b")])
        assert main(["evaluate", "--config", small_config(tmp_path), "--out", out_dir,
                     "--trace", str(tmp_path / "a" / "trace_yx.csv"),
                     "--reference", str(tmp_path / "b" / "trace_yx.csv")]) == EXIT_ERROR

    def test_bad_direction_prefix(self, tmp_path, out_dir):
        assert main(["evaluate", "--config", small_config(tmp_path), "--out", out_dir,
                     "--trace", "zz=trace.csv"]) == EXIT_CONFIG


class TestReproduceExample1:
    def test_check_failure_exit_code(self, out_dir, monkeypatch):
        monkeypatch.setattr(experiment, "MONTE_CARLO_TOLERANCE", -1.0)
        assert main(["reproduce-example1", "--config", EXAMPLE1_CONFIG, "--out", out_dir, "--n", "200"]) == EXIT_CHECK
        report = read_json(os.path.join(out_dir, "example1.json"))
        assert report["closed_form_ok"]
        assert not report["monte_carlo_ok"]

    @pytest.mark.slow
    def test_closed_form_and_monte_carlo(self, out_dir, capsys):
        assert main(["reproduce-example1", "--config", EXAMPLE1_CONFIG, "--out", out_dir]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["restricted_probability"] == pytest.approx(0.58, abs=1e-12)
        assert report["c_y1"] == pytest.approx(0.3635, abs=1e-4)
        assert report["c_y0"] == pytest.approx(0.0187, abs=1e-4)
        assert report["expected_measure"] == pytest.approx(0.0877, abs=1e-4)
        assert report["printed_expected_measure"] == 0.088
        assert abs(report["monte_carlo_mean"] - report["expected_measure"]) <= 0.02
        assert report["note"]


@pytest.mark.slow
def test_reproduce_fig1(out_dir):
    assert main(["reproduce-fig1", "--config", APP_CONFIG, "--out", out_dir]) == EXIT_OK
    summary = read_json(os.path.join(out_dir, "fig1_summary.json"))
    assert set(summary) == {"yx", "xy"}
    for direction in ("yx", "xy"):
        assert summary[direction]["change_point"] == 1000
        assert 0.5 <= summary[direction]["l_empirical"] <= 4.0
        assert summary[direction]["adaptation_window"] is not None
        assert summary[direction]["adaptation_window"] <= 300
        assert summary[direction]["pre_change_error"] < 0.05
        rate = summary[direction]["spike_match_rate"]
        assert rate is None or 0.0 <= rate <= 1.0
        report = read_json(os.path.join(out_dir, f"report_{direction}.json"))
        assert report["within_envelope"]
        assert report["satisfied"] is (True if report["applicable"] else None)
        frame = pd.read_csv(os.path.join(out_dir, f"trace_{direction}.csv"))
        assert len(frame) == 2000
        assert frame["C_true"].notna().all()
    manifest = read_json(os.path.join(out_dir, "manifest_fig1.json"))
    assert "fig1_summary.json" in manifest["files"]


@pytest.mark.parametrize("workers", [1, 2])
def test_sweep(tmp_path, workers):
    out_dir = str(tmp_path / "sweep")
    config = small_config(tmp_path, n=80, extra=f"sweep:\n  seeds: [0, 1, 2]\n  workers: {workers}\n")
    assert main(["sweep", "--config", config, "--out", out_dir]) == EXIT_OK
    rows = read_json(os.path.join(out_dir, "sweep_summary.json"))
    assert [row["seed"] for row in rows] == [0, 1, 2]
    for seed in (0, 1, 2):
        assert os.path.exists(os.path.join(out_dir, f"seed_{seed}", "trace_yx.csv"))
        assert os.path.exists(os.path.join(out_dir, f"seed_{seed}", "report_xy.json"))
    assert rows[0]["yx"]["c_hat_mean"] != rows[1]["yx"]["c_hat_mean"]
