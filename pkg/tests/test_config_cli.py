import json

import numpy as np
import pytest
from click.testing import CliRunner

from colme.cli import main, trace_to_csv
from colme.config import ConfigError, load_experiment_config, render_config
from colme.harness import VARIANT_C, VARIANT_CL, ExperimentConfig, run_experiment

VALID_CONFIG = """\
[experiment]
n = 24
class_means = 1.2, 2.0
sigma = 2.0
horizon = 80
replications = 2
seed = 11
variants = local, oracle, c-colme, cl-colme
prune_every = 1

[graph]
max_degree = 5

[estimators]
delta = 0.01
beta = 0.1      # fixed step size
beta_safety = 0.9
t_ramp = 50
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(VALID_CONFIG)
    return path


class TestConfigLoading:
    def test_valid(self, config_file):
        cfg = load_experiment_config(config_file)
        assert cfg.n == 24
        assert cfg.class_means == (1.2, 2.0)
        assert cfg.max_degree == 5
        assert cfg.beta == 0.1
        assert cfg.variants == ("local", "oracle", "c-colme", "cl-colme")

    def test_defaults_applied(self, tmp_path):
        path = tmp_path / "min.ini"
        path.write_text("[experiment]\nn = 4\nclass_means = 1.0\nsigma = 1.0\n"
                        "horizon = 10\n\n[graph]\nmax_degree = 2\n")
        cfg = load_experiment_config(path)
        assert cfg.replications == 1 and cfg.delta == 0.01 and cfg.t_ramp == 50

    def test_missing_required_field_named(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[experiment]\nclass_means = 1.0\nsigma = 1.0\n"
                        "horizon = 10\n\n[graph]\nmax_degree = 2\n")
        with pytest.raises(ConfigError, match="experiment.n"):
            load_experiment_config(path)

    def test_invalid_delta_named(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text(VALID_CONFIG.replace("delta = 0.01", "delta = 1.5"))
        with pytest.raises(ConfigError, match="delta"):
            load_experiment_config(path)

    def test_unparseable_value_named(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text(VALID_CONFIG.replace("n = 24", "n = twenty"))
        with pytest.raises(ConfigError, match="experiment.n"):
            load_experiment_config(path)

    def test_auto_beta(self, tmp_path):
        path = tmp_path / "auto.ini"
        path.write_text(VALID_CONFIG.replace("beta = 0.1      # fixed step size",
                                             "beta = auto"))
        assert load_experiment_config(path).beta == "auto"

    def test_render_roundtrip(self, tmp_path):
        cfg = ExperimentConfig(n=12, class_means=(0.5, 1.5, 9.0), sigma=0.25,
                               max_degree=3, horizon=44, replications=5, seed=99,
                               variants=(VARIANT_CL,), delta=0.02, beta="auto",
                               beta_safety=0.8, t_ramp=7, prune_every=3)
        path = tmp_path / "rt.ini"
        path.write_text(render_config(cfg))
        assert load_experiment_config(path) == cfg


class TestCsvSerialization:
    def test_schema_and_empty_columns(self, config_file):
        cfg = load_experiment_config(config_file)
        from dataclasses import replace
        trace = run_experiment(replace(cfg, variants=(VARIANT_CL,)))
        text = trace_to_csv(trace)
        lines = text.strip().split("\n")
        assert lines[0] == ("t,mse_local,mse_oracle,mse_c,mse_cl,"
                            "edges_removed,step_time_c_us,step_time_cl_us")
        assert len(lines) == cfg.horizon + 1
        first = lines[1].split(",")
        assert first[0] == "1"
        assert first[1] == "" and first[2] == "" and first[3] == ""
        assert float(first[4]) >= 0.0
        # timing columns stay empty so reruns are byte-identical
        assert first[6] == "" and first[7] == ""

    def test_floats_round_trip(self, config_file):
        cfg = load_experiment_config(config_file)
        trace = run_experiment(cfg)
        lines = trace_to_csv(trace).strip().split("\n")[1:]
        parsed = np.array([[float(p) for p in line.split(",")[1:6]]
                           for line in lines])
        assert np.array_equal(parsed[:, 3], trace.mse[VARIANT_CL])
        assert np.array_equal(parsed[:, 2], trace.mse[VARIANT_C])


class TestRunCommand:
    def test_run_writes_outputs(self, config_file, tmp_path):
        out = tmp_path / "out"
        result = CliRunner().invoke(main, ["run", "--config", str(config_file),
                                           "--out", str(out)])
        assert result.exit_code == 0, result.output
        csv_text = (out / "mse_trace.csv").read_text()
        assert len(csv_text.strip().split("\n")) == 81
        assert "final mse local" in (out / "summary.txt").read_text()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["seed"] == 11
        assert manifest["outputs"] == ["mse_trace.csv", "summary.txt"]
        assert "predicted separation" in result.output

    def test_rerun_is_byte_identical(self, config_file, tmp_path):
        runner = CliRunner()
        for name in ("a", "b"):
            result = runner.invoke(main, ["run", "--config", str(config_file),
                                          "--out", str(tmp_path / name)])
            assert result.exit_code == 0, result.output
        assert (tmp_path / "a" / "mse_trace.csv").read_bytes() == \
               (tmp_path / "b" / "mse_trace.csv").read_bytes()

    def test_invalid_config_exits_nonzero_naming_field(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text(VALID_CONFIG.replace("delta = 0.01", "delta = 1.5"))
        result = CliRunner().invoke(main, ["run", "--config", str(bad),
                                           "--out", str(tmp_path / "o")])
        assert result.exit_code != 0
        assert "delta" in result.output

    def test_seed_override_changes_manifest(self, config_file, tmp_path):
        out = tmp_path / "o"
        result = CliRunner().invoke(main, ["run", "--config", str(config_file),
                                           "--out", str(out), "--seed", "999",
                                           "--replications", "1"])
        assert result.exit_code == 0, result.output
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["seed"] == 999
        assert "replications = 1" in manifest["config"]


class TestBenchCommand:
    def test_bench_writes_report(self, config_file, tmp_path):
        out = tmp_path / "bench"
        result = CliRunner().invoke(main, ["bench", "--config", str(config_file),
                                           "--out", str(out)])
        assert result.exit_code == 0, result.output
        text = (out / "bench_report.txt").read_text()
        assert "c-colme" in text and "cl-colme" in text
        assert "ratio" in text

    def test_bench_single_variant(self, tmp_path):
        cfg = tmp_path / "one.ini"
        cfg.write_text(VALID_CONFIG.replace(
            "variants = local, oracle, c-colme, cl-colme",
            "variants = cl-colme"))
        out = tmp_path / "bench"
        result = CliRunner().invoke(main, ["bench", "--config", str(cfg),
                                           "--out", str(out)])
        assert result.exit_code == 0, result.output
        text = (out / "bench_report.txt").read_text()
        assert "cl-colme" in text and "c-colme " not in text
        assert "ratio" not in text


class TestSpectralCheckCommand:
    def test_path_graph_report(self):
        result = CliRunner().invoke(main, ["spectral-check", "--path-graph", "3",
                                           "--beta", "0.25", "--iters", "10,500"])
        assert result.exit_code == 0, result.output
        assert "components: 1" in result.output
        assert "stable: yes" in result.output
        dev = float(result.output.strip().split()[-1].split("=")[-1])
        assert dev < 1e-6

    def test_unstable_beta_warns_but_runs(self):
        result = CliRunner().invoke(main, ["spectral-check", "--path-graph", "3",
                                           "--beta", "1.0", "--iters", "10,200"])
        assert result.exit_code == 0, result.output
        assert "warning" in result.output and "stable: no" in result.output

    def test_empty_graph_identity_behavior(self):
        result = CliRunner().invoke(main, ["spectral-check", "--random", "4",
                                           "--max-degree", "0", "--seed", "1",
                                           "--beta", "0.1", "--iters", "10"])
        assert result.exit_code == 0, result.output
        assert "components: 4" in result.output
        assert "deviation_from_block_averaging=0.0" in result.output

    def test_edge_list_source(self, tmp_path):
        edges = tmp_path / "g.txt"
        edges.write_text("0 1\n1 2\n")
        result = CliRunner().invoke(main, ["spectral-check", "--edges", str(edges),
                                           "--beta", "0.25"])
        assert result.exit_code == 0, result.output
        assert "nodes: 3" in result.output

    def test_requires_exactly_one_source(self):
        result = CliRunner().invoke(main, ["spectral-check", "--path-graph", "3",
                                           "--random", "4", "--beta", "0.1"])
        assert result.exit_code != 0
        assert "exactly one" in result.output

    def test_cap_exceeded(self, tmp_path):
        result = CliRunner().invoke(main, ["spectral-check", "--random", "600",
                                           "--max-degree", "3", "--seed", "0",
                                           "--beta", "0.01"])
        assert result.exit_code != 0
        assert "cap" in result.output
