import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindep.errors import DegenerateSeriesError, IngestionError
from lindep.ts_core import (AcfEstimate, Partition, TaperSpec,
                            TimeSeriesMatrix, demean, lag_embed, load_csv,
                            sample_autocorrelation, sample_cross_covariance)


class TestTimeSeriesMatrix:
    def test_promotes_1d(self):
        tsm = TimeSeriesMatrix(np.arange(5.0))
        assert tsm.n_vars == 1 and tsm.n_obs == 5

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            TimeSeriesMatrix(np.array([[1.0, np.nan]]))

    def test_name_length_checked(self):
        with pytest.raises(ValueError):
            TimeSeriesMatrix(np.zeros((2, 4)) + np.arange(4), variable_names=["a"])

    def test_row_accessors(self):
        tsm = TimeSeriesMatrix(np.arange(6.0).reshape(3, 2))
        assert np.array_equal(tsm.row(1), [2.0, 3.0])
        assert np.array_equal(tsm.rows([0, 2]), [[0.0, 1.0], [4.0, 5.0]])


class TestPartition:
    def test_disjointness_enforced(self):
        with pytest.raises(ValueError):
            Partition(x_rows=(0,), y_rows=(0,))

    def test_validate_against(self):
        part = Partition(x_rows=(0,), y_rows=(3,))
        part.validate_against(4)
        with pytest.raises(ValueError):
            part.validate_against(3)


class TestDemean:
    def test_idempotent(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((3, 50)) + 5.0
        once = demean(a)
        assert np.allclose(once.mean(axis=1), 0.0, atol=1e-12)
        assert np.allclose(demean(once), once)

    def test_tsm_roundtrip(self):
        tsm = TimeSeriesMatrix(np.array([[1.0, 3.0]]), variable_names=["a"])
        out = demean(tsm)
        assert isinstance(out, TimeSeriesMatrix)
        assert np.allclose(out.data, [[-1.0, 1.0]])
        assert out.variable_names == ["a"]


class TestSampleCrossCovariance:
    # frozen small-vector oracle: a = [1,2,0,-1,3], b = [0.5,-1,2,1.5,-0.5]
    A = np.array([1.0, 2.0, 0.0, -1.0, 3.0])
    B = np.array([0.5, -1.0, 2.0, 1.5, -0.5])

    def test_lag1_oracle(self):
        assert sample_cross_covariance(demean(self.A), demean(self.B), 1) == pytest.approx(0.625)

    def test_negative_lag_oracle(self):
        assert sample_cross_covariance(demean(self.A), demean(self.B), -2) == pytest.approx(1.5)

    def test_lag0_matches_covariance(self):
        da, db = demean(self.A), demean(self.B)
        assert sample_cross_covariance(da, db, 0) == pytest.approx(float(da @ db) / 4)

    def test_lag_bound(self):
        with pytest.raises(ValueError):
            sample_cross_covariance(self.A, self.B, 5)


class TestSampleAutocorrelation:
    def test_frozen_oracle(self):
        # direct lag-sum oracle for [1,2,0,-1,3]: r = 1, -0.3, -0.4, 0.2, 0
        a = demean(np.array([1.0, 2.0, 0.0, -1.0, 3.0]))
        est = sample_autocorrelation(a)
        assert np.allclose(est.values, [1.0, -0.3, -0.4, 0.2, 0.0], atol=1e-12)

    def test_constant_raises(self):
        with pytest.raises(DegenerateSeriesError):
            sample_autocorrelation(np.zeros(16))

    def test_ar1_matches_coefficient(self):
        rng = np.random.default_rng(11)
        eps = rng.standard_normal(100_000)
        x = np.empty_like(eps)
        x[0] = eps[0]
        for t in range(1, len(x)):
            x[t] = 0.3 * x[t - 1] + eps[t]
        est = sample_autocorrelation(demean(x), max_lag=2)
        assert est.values[1] == pytest.approx(0.3, abs=0.01)

    def test_truncation_property(self):
        est = sample_autocorrelation(demean(np.arange(10.0) % 3), max_lag=4)
        assert est.truncation == 4
        assert est.values[0] == 1.0

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_bounded_and_unit_lag0(self, seed):
        x = demean(np.random.default_rng(seed).standard_normal(64))
        est = sample_autocorrelation(x)
        assert est.values[0] == 1.0
        assert np.all(np.abs(est.values) <= 1.0 + 1e-12)


class TestTaperSpec:
    def test_tukey_endpoints(self):
        w = TaperSpec("tukey", truncation=10).weights(10)
        assert w[0] == pytest.approx(1.0)
        assert w[10] == pytest.approx(0.0, abs=1e-15)
        assert w[5] == pytest.approx(0.5)

    def test_parzen_shape(self):
        w = TaperSpec("parzen", truncation=8).weights(8)
        assert w[0] == pytest.approx(1.0)
        # u/U = 0.5 boundary: 1 - 6/4 + 6/8 = 0.25 from both branches
        assert w[4] == pytest.approx(0.25)
        assert np.all(np.diff(w) <= 1e-12)

    def test_zero_beyond_truncation(self):
        w = TaperSpec("tukey", truncation=3).weights(6)
        assert np.all(w[4:] == 0.0)

    def test_applied_in_acf(self):
        x = demean(np.random.default_rng(3).standard_normal(32))
        plain = sample_autocorrelation(x, max_lag=8)
        tapered = sample_autocorrelation(x, max_lag=8, taper=TaperSpec("tukey", truncation=4))
        lam = TaperSpec("tukey", truncation=4).weights(8)
        expected = plain.values * lam
        expected[0] = 1.0
        assert np.allclose(tapered.values, expected)

    def test_unknown_window(self):
        with pytest.raises(ValueError):
            TaperSpec("hann")


class TestLagEmbed:
    def test_single_row_two_lags(self):
        out = lag_embed(np.arange(1.0, 6.0), [0], 2)
        # columns are times t = 2..4; row u holds x(t-u)
        assert np.array_equal(out, [[2.0, 3.0, 4.0], [1.0, 2.0, 3.0]])

    def test_variable_major_ordering(self):
        data = np.array([[1.0, 2.0, 3.0, 4.0], [10.0, 20.0, 30.0, 40.0]])
        out = lag_embed(data, [0, 1], 2)
        assert np.array_equal(out[0], [2.0, 3.0])   # row 0, lag 1
        assert np.array_equal(out[1], [1.0, 2.0])   # row 0, lag 2
        assert np.array_equal(out[2], [20.0, 30.0]) # row 1, lag 1

    def test_shift_alignment(self):
        out = lag_embed(np.arange(6.0), [0], 1, shift=2)
        assert np.array_equal(out, [[2.0, 3.0, 4.0]])

    def test_p_zero_empty(self):
        out = lag_embed(np.arange(5.0), [0], 0, shift=1)
        assert out.shape == (0, 4)

    def test_too_long_history(self):
        with pytest.raises(ValueError):
            lag_embed(np.arange(4.0), [0], 4)


class TestLoadCsv(object):
    def _write(self, tmp_path, text):
        p = tmp_path / "data.csv"
        p.write_text(text)
        return p

    def test_header_and_transpose(self, tmp_path):
        p = self._write(tmp_path, "a,b\n1,4\n2,5\n3,6\n")
        tsm = load_csv(p)
        assert tsm.variable_names == ["a", "b"]
        assert tsm.n_vars == 2 and tsm.n_obs == 3
        assert np.array_equal(tsm.row(1), [4.0, 5.0, 6.0])

    def test_headerless(self, tmp_path):
        tsm = load_csv(self._write(tmp_path, "1,2\n3,4\n"))
        assert tsm.variable_names is None

    def test_nan_rejected(self, tmp_path):
        with pytest.raises(IngestionError):
            load_csv(self._write(tmp_path, "a\n1\nnan\n"))

    def test_ragged_rejected(self, tmp_path):
        with pytest.raises(IngestionError):
            load_csv(self._write(tmp_path, "1,2\n3\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestionError):
            load_csv(tmp_path / "nope.csv")
