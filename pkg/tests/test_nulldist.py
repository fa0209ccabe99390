import numpy as np
import pytest
from scipy import stats

from lindep.errors import InsufficientEffectiveSamplesError
from lindep import nulldist
from lindep.nulldist import (DEFAULT_LAMBDA_SAMPLES, MIN_LAMBDA_SAMPLES,
                             NullFamily, beta_sample, chi2_cdf, f_cdf,
                             lambda_star_build, lambda_star_pvalue,
                             regularized_incomplete_beta, t_cdf)


class TestRegularizedIncompleteBeta:
    def test_boundaries(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0

    def test_uniform_case(self):
        for x in (0.1, 0.25, 0.9):
            assert regularized_incomplete_beta(1.0, 1.0, x) == pytest.approx(x, abs=1e-12)

    def test_symmetry_midpoint(self):
        assert regularized_incomplete_beta(2.0, 2.0, 0.5) == pytest.approx(0.5, abs=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            regularized_incomplete_beta(-1.0, 2.0, 0.5)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1.0, 2.0, 1.5)


class TestCdfs:
    def test_t_symmetry(self):
        for nu in (1.0, 4.5, 30.0):
            assert t_cdf(0.0, nu) == pytest.approx(0.5, abs=1e-12)

    def test_t_matches_reference(self):
        grid = np.linspace(-4, 4, 17)
        assert np.allclose(t_cdf(grid, 7.3), stats.t.cdf(grid, 7.3), atol=1e-9)

    def test_chi2_boundary_and_reference(self):
        assert chi2_cdf(0.0, 3.0) == 0.0
        grid = np.linspace(0, 20, 21)
        assert np.allclose(chi2_cdf(grid, 2.5), stats.chi2.cdf(grid, 2.5), atol=1e-9)

    def test_f_matches_reference(self):
        grid = np.linspace(0, 10, 21)
        assert np.allclose(f_cdf(grid, 3.0, 17.0), stats.f.cdf(grid, 3, 17), atol=1e-9)

    def test_t_squared_is_f(self):
        # t(nu)^2 ~ F(1, nu): f_cdf(t^2, 1, nu) = 2 t_cdf(t, nu) - 1 for t > 0
        for t in (0.3, 1.1, 2.7):
            for nu in (3.0, 11.5, 100.0):
                assert f_cdf(t * t, 1.0, nu) == pytest.approx(
                    2.0 * t_cdf(t, nu) - 1.0, abs=1e-12)

    def test_cdfs_nondecreasing(self):
        grid = np.linspace(0, 30, 1000)
        for cdf in (lambda g: chi2_cdf(g, 4.0), lambda g: f_cdf(g, 2.0, 9.0)):
            vals = cdf(grid)
            assert np.all(np.diff(vals) >= -1e-15)
        tvals = t_cdf(np.linspace(-8, 8, 1000), 6.0)
        assert np.all(np.diff(tvals) >= -1e-15)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            t_cdf(1.0, 0.0)
        with pytest.raises(ValueError):
            f_cdf(-1.0, 2.0, 2.0)
        with pytest.raises(ValueError):
            chi2_cdf(1.0, -2.0)


class TestBetaSample:
    def test_mean(self):
        rng = np.random.default_rng(42)
        draws = beta_sample(5.0, 0.5, rng, size=100_000)
        assert np.mean(draws) == pytest.approx(5.0 / 5.5, abs=0.005)

    def test_uniform_case_ks(self):
        rng = np.random.default_rng(43)
        draws = beta_sample(1.0, 1.0, rng, size=100_000)
        d = stats.kstest(draws, "uniform").statistic
        assert d < 0.006

    def test_arcsine_variance(self):
        rng = np.random.default_rng(44)
        draws = beta_sample(0.5, 0.5, rng, size=100_000)
        assert np.var(draws) == pytest.approx(0.125, abs=0.005)


class TestLambdaStarBuild:
    def test_single_factor_matches_beta_cdf(self):
        m = 50_000
        null = lambda_star_build([10.0], m_samples=m, seed=1)
        grid = np.linspace(0.01, 0.999, 200)
        emp = np.searchsorted(null.sorted_samples, grid, side="right") / m
        ana = stats.beta.cdf(grid, 5.0, 0.5)
        assert np.max(np.abs(emp - ana)) < 1.36 / np.sqrt(m)

    def test_two_factor_mean(self):
        null = lambda_star_build([10.0, 10.0], m_samples=100_000, seed=2)
        mean = (10.0 / 11.0) ** 2
        assert np.mean(null.sorted_samples) == pytest.approx(mean, abs=0.003)

    def test_support(self):
        null = lambda_star_build([3.0, 7.0, 2.5], m_samples=MIN_LAMBDA_SAMPLES, seed=3)
        s = null.sorted_samples
        assert np.all((s > 0.0) & (s <= 1.0))
        assert np.all(np.diff(s) >= 0)

    def test_reproducible(self):
        a = lambda_star_build([4.0, 6.0], m_samples=MIN_LAMBDA_SAMPLES, seed=9)
        b = lambda_star_build([4.0, 6.0], m_samples=MIN_LAMBDA_SAMPLES, seed=9)
        assert np.array_equal(a.sorted_samples, b.sorted_samples)

    def test_nonpositive_dof_rejected(self):
        with pytest.raises(InsufficientEffectiveSamplesError) as exc:
            lambda_star_build([5.0, -1.0, 3.0, 0.0], m_samples=MIN_LAMBDA_SAMPLES)
        assert exc.value.term_indices == [1, 3]

    def test_minimum_sample_count(self):
        with pytest.raises(ValueError):
            lambda_star_build([5.0], m_samples=100)


@pytest.fixture(scope="module")
def null():
    return lambda_star_build([8.0], m_samples=MIN_LAMBDA_SAMPLES, seed=5)


class TestLambdaStarPvalue:

    def test_statistic_one(self, null):
        assert lambda_star_pvalue(null, 1.0) == pytest.approx(1.0, abs=1e-3)

    def test_extreme_tail(self, null):
        tiny = float(null.sorted_samples[0]) / 2.0
        assert lambda_star_pvalue(null, tiny) == 1.0 / (null.sample_count + 1)

    def test_monotone_in_statistic(self, null):
        grid = np.linspace(0.01, 1.0, 50)
        pvals = [lambda_star_pvalue(null, s) for s in grid]
        assert np.all(np.diff(pvals) >= 0)

    def test_self_consistency_uniform(self):
        # statistics drawn from the same law give uniform p-values
        null = lambda_star_build([12.0], m_samples=MIN_LAMBDA_SAMPLES, seed=6)
        rng = np.random.default_rng(7)
        stats_draws = rng.beta(6.0, 0.5, 10_000)
        pvals = np.array([lambda_star_pvalue(null, s) for s in stats_draws])
        assert stats.kstest(pvals, "uniform").statistic < 0.02

    def test_domain(self, null):
        with pytest.raises(ValueError):
            lambda_star_pvalue(null, 0.0)
        with pytest.raises(ValueError):
            lambda_star_pvalue(null, 1.5)

    def test_matches_modified_f_for_single_term(self):
        # for b = 1, Lambda* and the F(1, n) tail on n r^2/(1-r^2) agree
        m = 100_000
        n = 20.0
        null = lambda_star_build([n], m_samples=m, seed=8)
        rng = np.random.default_rng(9)
        dkw = 1.36 / np.sqrt(m)
        for s in rng.uniform(0.05, 0.999, 1000):
            r2 = 1.0 - s
            fstat = n * r2 / (1.0 - r2)
            p_f = 1.0 - f_cdf(fstat, 1.0, n)
            p_l = lambda_star_pvalue(null, float(s))
            assert abs(p_f - p_l) < 2 * dkw


class TestVerdictType:
    def test_pvalue_bounds(self):
        with pytest.raises(ValueError):
            nulldist.TestVerdict(statistic=1.0, p_value=1.2, dof_used=(1.0,),
                                 null_family=NullFamily.F)

    def test_fields(self):
        v = nulldist.TestVerdict(statistic=2.0, p_value=0.3, dof_used=(1.0, 5.0),
                                 null_family=NullFamily.F, warnings=("clamped_ess",))
        assert v.null_family is NullFamily.F
        assert v.warnings == ("clamped_ess",)
