import numpy as np
import pytest
from scipy import stats

from lindep.errors import ConfigError, IngestionError
from lindep.harness import (ALPHA_GRID, ExperimentConfig, ExperimentReport,
                            ingest_and_test, run_experiment, sweep)
from lindep.ts_core import Partition


class TestExperimentConfig:
    def test_defaults_valid(self):
        cfg = ExperimentConfig()
        assert cfg.measure == "mi" and cfg.alpha == 0.05

    def test_unknown_measure(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(measure="entropy")

    def test_bivariate_dims_enforced(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(measure="mi", k=2)
        with pytest.raises(ConfigError):
            ExperimentConfig(measure="mi", c=1)

    def test_alpha_range(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(alpha=0.0)

    def test_prewhitening_univariate_only(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(measure="mvmi", k=2, l=2, prewhitening="ar1")

    def test_filter_validation_propagates(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(filter_kind="fir", filter_order=3)

    def test_roundtrip_dict(self):
        cfg = ExperimentConfig(measure="gc", gc_q=3, tests=("lambda_star",))
        again = ExperimentConfig.from_dict(cfg.to_dict())
        assert again == cfg

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"measure": "mi", "bogus": 1})


class TestRunExperiment:
    def test_deterministic_reports(self):
        cfg = ExperimentConfig(trials=25, seed=99)
        a = run_experiment(cfg)
        b = run_experiment(cfg)
        for fam in a.p_values:
            assert np.array_equal(a.p_values[fam], b.p_values[fam])
        assert a.dropped == b.dropped

    def test_bookkeeping_sums_to_trials(self):
        # heavy smoothing plus conditioning forces some drops
        cfg = ExperimentConfig(measure="cmi", trials=40, t=128, c=8,
                               phi_x=0.9, phi_y=0.9, filter_kind="butterworth",
                               filter_order=8, seed=4)
        rep = run_experiment(cfg)
        assert rep.n_evaluated + rep.n_dropped == 40
        assert all(isinstance(r, str) and r for _, r in rep.dropped)

    def test_fpr_counts_only_evaluated(self):
        cfg = ExperimentConfig(trials=30, seed=5)
        rep = run_experiment(cfg)
        fam = "lambda_star"
        manual = float(np.mean(rep.p_values[fam] <= cfg.alpha))
        assert rep.fpr[fam] == manual

    def test_ci_brackets_fpr(self):
        rep = run_experiment(ExperimentConfig(trials=50, seed=6))
        for fam, (lo, hi) in rep.ci.items():
            assert lo <= rep.fpr[fam] <= hi
            assert 0.0 <= lo and hi <= 1.0

    def test_alpha_sweep_shape_and_monotone(self):
        rep = run_experiment(ExperimentConfig(trials=50, seed=7))
        assert np.array_equal(rep.alpha_grid, ALPHA_GRID)
        for fam, curve in rep.fpr_curve.items():
            assert len(curve) == 100
            assert np.all(np.diff(curve) >= 0)

    def test_alpha_sweep_tracks_diagonal(self):
        # Lambda* under the null: |FPR(a) - a| within the binomial band
        # at >= 95% of grid points
        rep = run_experiment(ExperimentConfig(trials=400, seed=8,
                                              tests=("lambda_star",)))
        curve = rep.fpr_curve["lambda_star"]
        n = rep.n_evaluated
        band = 1.96 * np.sqrt(ALPHA_GRID * (1 - ALPHA_GRID) / n)
        inside = np.abs(curve - ALPHA_GRID) <= band
        assert np.mean(inside) >= 0.95

    def test_gc_measure_path(self):
        cfg = ExperimentConfig(measure="gc", trials=20, gc_p=2, gc_q=2, seed=9)
        rep = run_experiment(cfg)
        assert rep.n_evaluated == 20

    def test_gc_auto_embedding(self):
        cfg = ExperimentConfig(measure="gc", trials=5, gc_p=None, gc_q=None,
                               embed_max=5, seed=10)
        rep = run_experiment(cfg)
        assert rep.n_evaluated == 5

    def test_report_serializes(self):
        import json
        rep = run_experiment(ExperimentConfig(trials=10, seed=11))
        text = json.dumps(rep.to_dict())
        assert "fpr" in text


class TestSweep:
    def test_filter_order_grid(self):
        cfg = ExperimentConfig(trials=15, seed=12)
        reports = sweep(cfg, "filter_order", [0, 4])
        assert [r.config.filter_order for r in reports] == [0, 4]
        assert [r.grid_index for r in reports] == [0, 1]

    def test_dimension_grid_sets_k_and_l(self):
        cfg = ExperimentConfig(measure="mvmi", trials=5, seed=13)
        reports = sweep(cfg, "dimension", [1, 2])
        assert reports[1].config.k == 2 and reports[1].config.l == 2

    def test_grid_points_use_distinct_streams(self):
        cfg = ExperimentConfig(trials=15, seed=14)
        reports = sweep(cfg, "sample_size", [256, 256])
        a, b = reports
        assert not np.array_equal(a.p_values["lambda_star"],
                                  b.p_values["lambda_star"])

    def test_unknown_variable(self):
        with pytest.raises(ConfigError):
            sweep(ExperimentConfig(trials=1), "cutoff", [1])

    def test_empty_grid(self):
        with pytest.raises(ConfigError):
            sweep(ExperimentConfig(trials=1), "filter_order", [])


class TestIngestAndTest:
    def _write_csv(self, tmp_path, data, header=None):
        p = tmp_path / "input.csv"
        lines = []
        if header:
            lines.append(",".join(header))
        for row in np.asarray(data).T:
            lines.append(",".join(f"{v:.8g}" for v in row))
        p.write_text("\n".join(lines) + "\n")
        return p

    def test_basic_mi(self, tmp_path):
        rng = np.random.default_rng(15)
        p = self._write_csv(tmp_path, rng.standard_normal((2, 300)))
        res = ingest_and_test(p, Partition(x_rows=(0,), y_rows=(1,)), "mi")
        assert set(res.verdicts) == {"lambda_star", "chi2", "f"}

    def test_detrend_removes_line(self, tmp_path):
        rng = np.random.default_rng(16)
        t = np.arange(300.0)
        data = rng.standard_normal((2, 300)) + 0.05 * t
        p = self._write_csv(tmp_path, data)
        res_raw = ingest_and_test(p, Partition((0,), (1,)), "mi", seed=1)
        res_dt = ingest_and_test(p, Partition((0,), (1,)), "mi", detrend=True,
                                 seed=1)
        # the shared trend fakes dependence; detrending removes it
        assert res_dt.measure_value < res_raw.measure_value

    def test_bandpass_trims_edges(self, tmp_path):
        rng = np.random.default_rng(17)
        p = self._write_csv(tmp_path, rng.standard_normal((2, 600)))
        res = ingest_and_test(p, Partition((0,), (1,)), "mi",
                              bandpass=(0.05, 0.45))
        assert res.n_obs == 200

    def test_too_short_after_trim(self, tmp_path):
        rng = np.random.default_rng(18)
        p = self._write_csv(tmp_path, rng.standard_normal((2, 120)))
        with pytest.raises(IngestionError):
            ingest_and_test(p, Partition((0,), (1,)), "mi", trim=40)

    def test_partition_out_of_range(self, tmp_path):
        rng = np.random.default_rng(19)
        p = self._write_csv(tmp_path, rng.standard_normal((1, 100)))
        with pytest.raises(ConfigError):
            ingest_and_test(p, Partition((0,), (1,)), "mi")

    def test_nan_is_ingestion_error(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b\n1,2\nnan,3\n")
        with pytest.raises(IngestionError):
            ingest_and_test(p, Partition((0,), (1,)), "mi")

    def test_pvalues_uniform_over_corpus(self, tmp_path):
        # self-generated null corpus: Lambda* p-values uniform across files
        rng = np.random.default_rng(23)
        pvals = []
        for i in range(200):
            p = self._write_csv(tmp_path, rng.standard_normal((2, 256)))
            res = ingest_and_test(p, Partition((0,), (1,)), "mi", seed=i)
            pvals.append(res.verdicts["lambda_star"].p_value)
        assert stats.kstest(pvals, "uniform").statistic < 0.05
