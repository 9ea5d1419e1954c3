import numpy as np
import pytest

from colme.harness import (ALL_VARIANTS, VARIANT_C, VARIANT_CL, VARIANT_LOCAL,
                           VARIANT_ORACLE, ExperimentConfig, _max_workers,
                           benchmark_variants, count_cross_class_edges,
                           run_experiment, run_replication)
from colme.graphs import Graph

SMALL = ExperimentConfig(n=30, class_means=(1.2, 2.0), sigma=2.0, max_degree=5,
                         horizon=120, replications=3, seed=17)


class TestConfigValidation:
    def test_valid(self):
        SMALL.validate()

    @pytest.mark.parametrize("field,value,match", [
        ("n", 0, "n must be"),
        ("sigma", -1.0, "sigma"),
        ("horizon", 0, "horizon"),
        ("replications", 0, "replications"),
        ("delta", 1.5, "delta"),
        ("delta", 0.0, "delta"),
        ("beta", -0.5, "beta"),
        ("beta", "spectral", "beta"),
        ("beta_safety", 1.0, "beta_safety"),
        ("t_ramp", 0, "t_ramp"),
        ("prune_every", 0, "prune_every"),
        ("variants", (), "variants"),
        ("variants", ("b-colme",), "unknown variant"),
        ("class_means", (1.0, 1.0), "distinct"),
        ("max_degree", -1, "max_degree"),
        ("seed", -1, "seed"),
    ])
    def test_invalid(self, field, value, match):
        from dataclasses import replace
        with pytest.raises(ValueError, match=match):
            replace(SMALL, **{field: value}).validate()

    def test_predicted_separation(self):
        assert SMALL.predicted_separation_time() == 417
        single = ExperimentConfig(n=4, class_means=(1.0,), sigma=1.0,
                                  max_degree=2, horizon=10)
        assert single.predicted_separation_time() is None


class TestDeterminism:
    def test_replication_is_bit_reproducible(self):
        a = run_replication(SMALL, 1)
        b = run_replication(SMALL, 1)
        for tag in SMALL.variants:
            assert np.array_equal(a.mse[tag], b.mse[tag])
        assert np.array_equal(a.edges_removed, b.edges_removed)
        for tag in a.final_mu:
            assert np.array_equal(a.final_mu[tag], b.final_mu[tag])

    def test_replications_differ(self):
        a = run_replication(SMALL, 0)
        b = run_replication(SMALL, 1)
        assert not np.array_equal(a.mse[VARIANT_LOCAL], b.mse[VARIANT_LOCAL])

    def test_experiment_mean_equals_serial_replications(self):
        trace = run_experiment(SMALL)
        singles = [run_replication(SMALL, r) for r in range(SMALL.replications)]
        for tag in SMALL.variants:
            expected = np.stack([s.mse[tag] for s in singles]).mean(axis=0)
            assert np.array_equal(trace.mse[tag], expected)

    def test_single_replication_average_is_identity(self):
        from dataclasses import replace
        cfg = replace(SMALL, replications=1)
        trace = run_experiment(cfg)
        single = run_replication(cfg, 0)
        for tag in cfg.variants:
            assert np.array_equal(trace.mse[tag], single.mse[tag])

    def test_thread_count_does_not_change_results(self, monkeypatch):
        monkeypatch.setenv("COLME_THREADS", "1")
        serial = run_experiment(SMALL)
        monkeypatch.setenv("COLME_THREADS", "3")
        threaded = run_experiment(SMALL)
        for tag in SMALL.variants:
            assert np.array_equal(serial.mse[tag], threaded.mse[tag])
        assert np.array_equal(serial.edges_removed, threaded.edges_removed)


class TestSimulationBehavior:
    def test_noiseless_single_class_mse_is_machine_zero(self):
        cfg = ExperimentConfig(n=20, class_means=(1.7,), sigma=0.0, max_degree=4,
                               horizon=150, replications=2, seed=3)
        trace = run_experiment(cfg)
        for tag in ALL_VARIANTS:
            assert trace.mse[tag].max() < 1e-28

    def test_local_variant_matches_sample_mean_variance(self):
        # single agent: expected squared error sigma^2 / t
        cfg = ExperimentConfig(n=1, class_means=(0.3,), sigma=2.0, max_degree=0,
                               horizon=100, replications=300, seed=5,
                               variants=(VARIANT_LOCAL,))
        trace = run_experiment(cfg)
        for t in (10, 100):
            expected = 4.0 / t
            assert trace.mse[VARIANT_LOCAL][t - 1] == pytest.approx(expected, rel=0.2)

    def test_prune_cadence_respected(self):
        from dataclasses import replace
        cfg = replace(SMALL, prune_every=7, horizon=100)
        rep = run_replication(cfg, 0)
        removed_at = np.nonzero(rep.edges_removed)[0] + 1
        assert removed_at.size > 0
        assert np.all(removed_at % 7 == 0)

    def test_variant_subset(self):
        from dataclasses import replace
        cfg = replace(SMALL, variants=(VARIANT_CL,))
        trace = run_experiment(cfg)
        assert set(trace.mse) == {VARIANT_CL}
        assert set(trace.step_us) == {VARIANT_CL}

    def test_edges_only_shrink(self):
        rep = run_replication(SMALL, 0)
        assert rep.n_edges_final <= rep.n_edges_initial
        assert rep.edges_removed.sum() == rep.n_edges_initial - rep.n_edges_final

    def test_auto_beta_resolves_from_spectral_bound(self):
        from dataclasses import replace
        cfg = replace(SMALL, beta="auto")
        rep = run_replication(cfg, 0)
        assert 0.0 < rep.beta_used
        # degrees only shrink under pruning, so the initial bound stays valid
        assert rep.beta_used * 2 * cfg.max_degree <= cfg.beta_safety + 1e-15

    def test_cross_class_edge_counter(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
        assignment = np.array([0, 0, 1, 1])
        assert count_cross_class_edges(g, assignment) == 1

    def test_oracle_dominates_consensus_per_replication(self):
        # slow ramp keeps weight on fresh local means, so the ordering is
        # resolvable per replication instead of a near-tie
        cfg = ExperimentConfig(n=60, class_means=(1.2, 2.0), sigma=2.0,
                               max_degree=6, horizon=1200, replications=10,
                               seed=29, t_ramp=400)
        trace = run_experiment(cfg)
        wins = sum(1 for r in trace.reps
                   if r.mse[VARIANT_ORACLE][-1] <=
                   min(r.mse[VARIANT_C][-1], r.mse[VARIANT_CL][-1]))
        assert wins >= 9


class TestBenchmark:
    def test_report_contents(self):
        from dataclasses import replace
        cfg = replace(SMALL, replications=2)
        report = benchmark_variants(cfg)
        assert set(report.variants) == {VARIANT_C, VARIANT_CL}
        c, cl = report.variants[VARIANT_C], report.variants[VARIANT_CL]
        assert cl.divisions_total == 0
        assert cl.steady_div_per_step == 0
        assert c.steady_div_per_step == 0
        assert c.rebuild_div_min >= report.n_edges_final
        assert c.divisions_total > 0
        assert c.steps_measured == cl.steps_measured == 2 * cfg.horizon
        assert report.time_ratio_cl_over_c is not None
        text = report.to_text()
        assert "c-colme" in text and "cl-colme" in text and "ratio" in text

    def test_single_variant_no_comparison(self):
        from dataclasses import replace
        cfg = replace(SMALL, variants=(VARIANT_CL,))
        report = benchmark_variants(cfg)
        assert set(report.variants) == {VARIANT_CL}
        assert report.time_ratio_cl_over_c is None
        assert "ratio" not in report.to_text()

    def test_requires_consensus_variant(self):
        from dataclasses import replace
        cfg = replace(SMALL, variants=(VARIANT_LOCAL, VARIANT_ORACLE))
        with pytest.raises(ValueError, match="benchmark"):
            benchmark_variants(cfg)


class TestWorkerCount:
    def test_auto(self, monkeypatch):
        monkeypatch.delenv("COLME_THREADS", raising=False)
        assert 1 <= _max_workers(8) <= 8

    def test_explicit_cap(self, monkeypatch):
        monkeypatch.setenv("COLME_THREADS", "2")
        assert _max_workers(8) == 2
        assert _max_workers(1) == 1

    def test_zero_is_auto(self, monkeypatch):
        monkeypatch.setenv("COLME_THREADS", "0")
        assert _max_workers(4) >= 1

    def test_invalid(self, monkeypatch):
        monkeypatch.setenv("COLME_THREADS", "many")
        with pytest.raises(ValueError, match="COLME_THREADS"):
            _max_workers(4)
