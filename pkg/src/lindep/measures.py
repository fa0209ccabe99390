"""Dependence measures and their hypothesis tests.

Every measure here is a ratio of generalized variances, computed as a
chain of partial correlations. Each chain term carries its own effective
degrees of freedom (from the residual autocorrelations), which
parameterize the Monte-Carlo Lambda* null; classical chi-square and F
verdicts are provided alongside for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateSeriesError, InsufficientEffectiveSamplesError
from .ess import effective_dof, effective_sample_size
from .linreg import OrthonormalBasis, generalized_variance_logdet, ols_residuals, partial_autocorrelation
from .nulldist import (NullFamily, TestVerdict, chi2_cdf, f_cdf,
                       lambda_star_build, lambda_star_pvalue, t_cdf,
                       DEFAULT_LAMBDA_SAMPLES)
from .ts_core import TaperSpec, demean, lag_embed

__all__ = [
    "ChainTerm",
    "DependenceResult",
    "pearson_test_modified",
    "partial_corr_test_modified",
    "mi_gaussian",
    "mi_gaussian_direct",
    "granger_causality",
    "granger_causality_direct",
    "active_information_storage",
    "ais_embedding_select",
    "classical_tests",
]

# Tests error (and harness trials drop) when any term's effective dof falls
# at or below this; truncating the dof vector silently would bias the null.
MIN_TERM_DOF = 2.0


@dataclass(frozen=True)
class ChainTerm:
    indices: tuple[int, ...]
    partial_corr: float
    conditioning_dim: int
    eta_hat: float
    effective_dof: float
    clamped: bool = False

    @property
    def information(self) -> float:
        """-1/2 log(1 - r^2), the term's contribution in nats."""
        return -0.5 * math.log1p(-self.partial_corr**2)


@dataclass(frozen=True)
class DependenceResult:
    measure_value: float
    terms: tuple[ChainTerm, ...]
    verdicts: dict
    n_obs: int
    warnings: tuple[str, ...] = ()

    @property
    def dof_vector(self) -> np.ndarray:
        return np.array([t.effective_dof for t in self.terms])


def _as_rows(a) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError("expected a 1-D or 2-D array")
    return arr


def _corr(ex: np.ndarray, ey: np.ndarray) -> float:
    nx = float(np.linalg.norm(ex))
    ny = float(np.linalg.norm(ey))
    if nx == 0.0 or ny == 0.0:
        raise DegenerateSeriesError("zero residual variance in chain term")
    return min(1.0, max(-1.0, float(ex @ ey) / (nx * ny)))


def _check_dof_vector(terms: Sequence[ChainTerm]):
    bad = [i for i, t in enumerate(terms) if t.effective_dof <= MIN_TERM_DOF]
    if bad:
        raise InsufficientEffectiveSamplesError(
            f"effective dof <= {MIN_TERM_DOF} at chain term(s) "
            + ", ".join(str(terms[i].indices) for i in bad),
            term_indices=bad)


def _lambda_star_verdict(terms, statistic, m_samples, seed, warnings=()):
    _check_dof_vector(terms)
    statistic = min(1.0, max(1e-300, statistic))
    null = lambda_star_build([t.effective_dof for t in terms],
                             m_samples=m_samples, seed=seed)
    p = lambda_star_pvalue(null, statistic)
    return TestVerdict(statistic=statistic, p_value=p,
                       dof_used=tuple(t.effective_dof for t in terms),
                       null_family=NullFamily.LAMBDA_STAR, warnings=tuple(warnings))


def _chi2_verdict(statistic, dof, warnings=()):
    p = 1.0 - chi2_cdf(max(statistic, 0.0), dof)
    return TestVerdict(statistic=statistic, p_value=float(p), dof_used=(dof,),
                       null_family=NullFamily.CHI_SQUARE, warnings=tuple(warnings))


def _f_verdict(statistic, d1, d2, warnings=()):
    p = 1.0 - f_cdf(max(statistic, 0.0), d1, d2)
    return TestVerdict(statistic=statistic, p_value=float(p), dof_used=(d1, d2),
                       null_family=NullFamily.F, warnings=tuple(warnings))


def _t_verdict(statistic, dof, tails, warnings=()):
    if tails == "two":
        p = 2.0 * (1.0 - t_cdf(abs(statistic), dof))
    elif tails == "one":
        p = 1.0 - t_cdf(statistic, dof)
    else:
        raise ValueError("tails must be 'one' or 'two'")
    return TestVerdict(statistic=statistic, p_value=float(min(1.0, p)),
                       dof_used=(dof,), null_family=NullFamily.STUDENT_T,
                       warnings=tuple(warnings))


def pearson_test_modified(x, y, taper: TaperSpec = TaperSpec()) -> DependenceResult:
    """Correlation test with effective degrees of freedom eta - 2.

    The statistic r sqrt((eta-2)/(1-r^2)) is referred to a t(eta-2) null,
    with eta estimated from the two series' autocorrelations.
    """
    return partial_corr_test_modified(x, y, None, taper=taper)


def partial_corr_test_modified(x, y, w=None, tails: str = "two",
                               taper: TaperSpec = TaperSpec()) -> DependenceResult:
    """Partial-correlation test with effective dof eta - c - 2.

    Returns t (per `tails`, default two-tailed), a one-tailed t, and the
    equivalent modified F verdict on the squared statistic.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be aligned 1-D rows")
    if len(x) < 8:
        raise ValueError("need T >= 8 for a meaningful autocorrelation estimate")
    w_arr = _as_rows(w) if w is not None and np.size(w) else np.empty((0, len(x)))
    c = w_arr.shape[0]
    res = ols_residuals(np.vstack([x, y]), w_arr)
    ex, ey = res.residuals
    r = _corr(ex, ey)
    ess = effective_sample_size(ex, ey, taper)
    dof = effective_dof(ess.eta_hat, c)
    if dof <= 0:
        raise InsufficientEffectiveSamplesError(
            f"effective dof {dof:.3f} <= 0", term_indices=[0])
    warns = ("clamped_ess",) if ess.clamped else ()
    term = ChainTerm(indices=(0, 0), partial_corr=r, conditioning_dim=c,
                     eta_hat=ess.eta_hat, effective_dof=dof, clamped=ess.clamped)
    t_stat = r * math.sqrt(dof / max(1.0 - r * r, 1e-300))
    verdicts = {
        "t": _t_verdict(t_stat, dof, tails, warns),
        "t_one_tailed": _t_verdict(t_stat, dof, "one", warns),
        "f": _f_verdict(t_stat * t_stat, 1.0, dof, warns),
    }
    return DependenceResult(measure_value=-0.5 * math.log1p(-r * r),
                            terms=(term,), verdicts=verdicts,
                            n_obs=len(x), warnings=warns)


def _chain_over_y(target, y_cols, base_blocks, base_dim, index_prefix,
                  y_indices, taper):
    """Partial-correlation chain: regress target and successive y columns on
    a growing conditioning set, yielding one ChainTerm per y column.

    base_blocks rows are conditioned on throughout; the i-th y column is
    conditioned on all earlier y columns. base_dim is the conditioning
    dimension attributed to base_blocks (regressor rows, no intercept).
    """
    n = len(target)
    basis = OrthonormalBasis(n)
    for block in base_blocks:
        if block.size:
            basis.add_block(block)
    ex = basis.residual(target)
    terms = []
    for i, ycol in enumerate(y_cols):
        ey = basis.residual(ycol)
        r = _corr(ex, ey)
        ess = effective_sample_size(ex, ey, taper)
        dim = base_dim + i
        dof = effective_dof(ess.eta_hat, dim)
        terms.append(ChainTerm(indices=index_prefix + y_indices[i],
                               partial_corr=r, conditioning_dim=dim,
                               eta_hat=ess.eta_hat, effective_dof=dof,
                               clamped=ess.clamped))
        if i + 1 < len(y_cols):
            basis.add(ycol)
            qlast = basis._q[:, -1]
            ex = ex - qlast * float(qlast @ ex)
    return terms


def mi_gaussian(x, y, w=None, *, taper: TaperSpec = TaperSpec(),
                tests: Sequence[str] = ("lambda_star", "chi2", "f"),
                lambda_m: int = DEFAULT_LAMBDA_SAMPLES,
                seed: int = 0) -> DependenceResult:
    """Gaussian (conditional) mutual information between row blocks x and y.

    The measure is accumulated over the (g, h) partial-correlation chain;
    the total equals the direct log-determinant ratio. Verdicts: the
    Lambda* test on exp(-2 I), the asymptotic chi-square test on 2 T I,
    and (when x is univariate) the classical F test.
    """
    x = _as_rows(x)
    y = _as_rows(y)
    k, t = x.shape
    l = y.shape[0]
    if y.shape[1] != t:
        raise ValueError("x and y must share T")
    w_arr = _as_rows(w) if w is not None and np.size(w) else np.empty((0, t))
    c = w_arr.shape[0]
    terms: list[ChainTerm] = []
    for g in range(k):
        base = [w_arr, x[:g]]
        terms.extend(_chain_over_y(
            x[g], list(y), base, base_dim=c + g, index_prefix=(g + 1,),
            y_indices=[(h + 1,) for h in range(l)], taper=taper))
    value = float(sum(term.information for term in terms))
    warns = tuple(sorted({"clamped_ess"} if any(t_.clamped for t_ in terms) else set()))
    verdicts = {}
    if "chi2" in tests:
        verdicts["chi2"] = _chi2_verdict(2.0 * t * value, float(k * l), warns)
    if "f" in tests and k == 1:
        d2 = t - (l + c + 1)
        if d2 > 0:
            stat = (d2 / l) * math.expm1(2.0 * value)
            verdicts["f"] = _f_verdict(stat, float(l), float(d2), warns)
    if "lambda_star" in tests:
        verdicts["lambda_star"] = _lambda_star_verdict(
            terms, math.exp(-2.0 * value), lambda_m, seed, warns)
    return DependenceResult(measure_value=value, terms=tuple(terms),
                            verdicts=verdicts, n_obs=t, warnings=warns)


def mi_gaussian_direct(x, y, w=None) -> float:
    """Mutual information from generalized variances (log-determinants).

    Independent computation path used to cross-check the chain sum.
    """
    x = _as_rows(x)
    y = _as_rows(y)
    t = x.shape[1]
    w_arr = _as_rows(w) if w is not None and np.size(w) else np.empty((0, t))
    res = ols_residuals(np.vstack([x, y]), w_arr)
    e = res.residuals
    k = x.shape[0]
    full = generalized_variance_logdet(res)
    lx = generalized_variance_logdet(
        ResidualView(e[:k], res.regressor_count, res.valid_length))
    ly = generalized_variance_logdet(
        ResidualView(e[k:], res.regressor_count, res.valid_length))
    return -0.5 * (full - lx - ly)


def granger_causality(x, y, w=None, p: int = 1, q: int = 1, *,
                      taper: TaperSpec = TaperSpec(),
                      tests: Sequence[str] = ("lambda_star", "chi2", "f"),
                      lambda_m: int = DEFAULT_LAMBDA_SAMPLES,
                      seed: int = 0) -> DependenceResult:
    """Granger causality from y to x given w, in Geweke (log-ratio) units.

    Decomposed over the (g, h, j) chain; the (g, h, j) term correlates
    x_g(t) with y_h(t-j) given the contemporaneous x_1..x_{g-1}, the full
    p-lag history of x, the earlier y histories, and w. The chain total
    equals the direct log-ratio of generalized variances.
    """
    x = _as_rows(x)
    y = _as_rows(y)
    k, t = x.shape
    l = y.shape[0]
    if y.shape[1] != t:
        raise ValueError("x and y must share T")
    if p < 1 or q < 1:
        raise ValueError("need p >= 1 and q >= 1")
    pmax = max(p, q)
    if pmax >= t - 1:
        raise ValueError("history length too large for T")
    w_arr = _as_rows(w) if w is not None and np.size(w) else np.empty((0, t))
    c = w_arr.shape[0]
    t_eff = t - pmax
    xt = x[:, pmax:]
    wt = w_arr[:, pmax:] if c else np.empty((0, t_eff))
    x_past = lag_embed(x, range(k), p, shift=pmax - p)
    y_embs = [lag_embed(y, [h], q, shift=pmax - q) for h in range(l)]
    terms: list[ChainTerm] = []
    for g in range(k):
        base = [xt[:g], x_past, wt]
        base_dim = g + k * p + c
        y_cols = [y_embs[h][j] for h in range(l) for j in range(q)]
        y_idx = [(h + 1, j + 1) for h in range(l) for j in range(q)]
        terms.extend(_chain_over_y(
            xt[g], y_cols, base, base_dim=base_dim,
            index_prefix=(g + 1,), y_indices=y_idx, taper=taper))
    value = float(sum(2.0 * term.information for term in terms))
    warns = tuple(sorted({"clamped_ess"} if any(t_.clamped for t_ in terms) else set()))
    verdicts = {}
    if "chi2" in tests:
        verdicts["chi2"] = _chi2_verdict(t_eff * value, float(k * l * q), warns)
    if "f" in tests and k == 1:
        d2 = t_eff - (p + l * q + c + 1)
        if d2 > 0:
            stat = (d2 / (l * q)) * math.expm1(value)
            verdicts["f"] = _f_verdict(stat, float(l * q), float(d2), warns)
    if "lambda_star" in tests:
        verdicts["lambda_star"] = _lambda_star_verdict(
            terms, math.exp(-value), lambda_m, seed, warns)
    return DependenceResult(measure_value=value, terms=tuple(terms),
                            verdicts=verdicts, n_obs=t_eff, warnings=warns)


def granger_causality_direct(x, y, w=None, p: int = 1, q: int = 1) -> float:
    """Granger causality as the log-ratio of residual generalized variances."""
    x = _as_rows(x)
    y = _as_rows(y)
    k, t = x.shape
    pmax = max(p, q)
    w_arr = _as_rows(w) if w is not None and np.size(w) else np.empty((0, t))
    xt = x[:, pmax:]
    wt = w_arr[:, pmax:] if w_arr.shape[0] else np.empty((0, t - pmax))
    x_past = lag_embed(x, range(k), p, shift=pmax - p)
    y_past = np.vstack([lag_embed(y, [h], q, shift=pmax - q)
                        for h in range(y.shape[0])])
    restricted = ols_residuals(xt, np.vstack([x_past, wt]))
    unrestricted = ols_residuals(xt, np.vstack([x_past, y_past, wt]))
    return (generalized_variance_logdet(restricted)
            - generalized_variance_logdet(unrestricted))


class ResidualView:
    """Duck-typed ResidualSet over a row subset (avoids re-validating)."""

    def __init__(self, residuals, regressor_count, valid_length):
        self.residuals = residuals
        self.regressor_count = regressor_count
        self.valid_length = valid_length


def active_information_storage(x, p: int) -> float:
    """Memory of a process over its last p states, in nats.

    Equals -1/2 sum_{u<=p} log(1 - alpha(u)^2) with alpha the partial
    autocorrelation function.
    """
    if p == 0:
        return 0.0
    alphas = partial_autocorrelation(np.asarray(x, dtype=float), p)
    return float(-0.5 * np.sum(np.log1p(-alphas**2)))


def ais_embedding_select(x, max_p: int, alpha: float = 0.05) -> int:
    """Smallest history length whose next increment is insignificant.

    Each storage increment delta(u) = -1/2 log(1 - alpha(u)^2) is referred
    to a chi-square(1) null via the likelihood-ratio statistic 2 T' delta.
    """
    x = np.asarray(x, dtype=float)
    alphas = partial_autocorrelation(x, max_p)
    selected = 0
    for u in range(1, max_p + 1):
        delta = -0.5 * math.log1p(-alphas[u - 1]**2)
        t_eff = len(x) - u
        pval = 1.0 - chi2_cdf(2.0 * t_eff * delta, 1.0)
        if pval < alpha:
            selected = u
        else:
            break
    return selected


def classical_tests(measure_value: float, family: str, kind: str, *,
                    k: int = 1, l: int = 1, c: int = 0, p: int = 1,
                    q: int = 1, t: int = 0) -> TestVerdict:
    """Unmodified chi-square / F verdicts for an MI or GC estimate.

    kind is 'mi' (value in nats) or 'gc' (Geweke units); t is the number
    of aligned observations entering the regressions.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if kind == "mi":
        if family == "chi2":
            return _chi2_verdict(2.0 * t * measure_value, float(k * l))
        if family == "f":
            if k != 1:
                raise ValueError("the F test requires univariate x")
            d2 = t - (l + c + 1)
            if d2 <= 0:
                raise ValueError("nonpositive F denominator dof")
            return _f_verdict((d2 / l) * math.expm1(2.0 * measure_value),
                              float(l), float(d2))
    elif kind == "gc":
        if family == "chi2":
            return _chi2_verdict(t * measure_value, float(k * l * q))
        if family == "f":
            if k != 1:
                raise ValueError("the F test requires univariate x")
            d2 = t - (p + l * q + c + 1)
            if d2 <= 0:
                raise ValueError("nonpositive F denominator dof")
            return _f_verdict((d2 / (l * q)) * math.expm1(measure_value),
                              float(l * q), float(d2))
    raise ValueError(f"unknown family {family!r} / kind {kind!r}")
