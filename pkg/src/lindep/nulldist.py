"""Classical null CDFs and the Monte-Carlo Lambda*(n) null distribution.

Lambda*(n) is the law of a product of b independent Beta(n_i/2, 1/2)
variates; it is the null for ratios of generalized variances when each
partial-correlation term carries its own effective degrees of freedom.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import special

from .errors import InsufficientEffectiveSamplesError

__all__ = [
    "NullFamily",
    "TestVerdict",
    "LambdaStarNull",
    "regularized_incomplete_beta",
    "t_cdf",
    "f_cdf",
    "chi2_cdf",
    "beta_sample",
    "lambda_star_build",
    "lambda_star_pvalue",
]

DEFAULT_LAMBDA_SAMPLES = 100_000
MIN_LAMBDA_SAMPLES = 10_000


class NullFamily(str, Enum):
    STUDENT_T = "t"
    F = "f"
    CHI_SQUARE = "chi2"
    LAMBDA_STAR = "lambda_star"


@dataclass(frozen=True)
class TestVerdict:
    statistic: float
    p_value: float
    dof_used: tuple[float, ...]
    null_family: NullFamily
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p_value must lie in [0, 1]")


def regularized_incomplete_beta(a: float, b: float, x) -> float:
    """I_x(a, b), the regularized incomplete beta function."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise ValueError("x must lie in [0, 1]")
    out = special.betainc(a, b, x)
    return float(out) if out.ndim == 0 else out


def t_cdf(t, nu: float):
    """CDF of Student's t with (real) nu > 0 degrees of freedom."""
    if nu <= 0:
        raise ValueError("nu must be positive")
    t = np.asarray(t, dtype=float)
    x = nu / (nu + t**2)
    tail = 0.5 * special.betainc(nu / 2.0, 0.5, x)
    out = np.where(t >= 0, 1.0 - tail, tail)
    return float(out) if out.ndim == 0 else out


def f_cdf(f, d1: float, d2: float):
    """CDF of the F distribution with real positive dofs d1, d2."""
    if d1 <= 0 or d2 <= 0:
        raise ValueError("degrees of freedom must be positive")
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise ValueError("f must be nonnegative")
    x = d1 * f / (d1 * f + d2)
    out = special.betainc(d1 / 2.0, d2 / 2.0, x)
    return float(out) if out.ndim == 0 else out


def chi2_cdf(x, k: float):
    """CDF of the chi-square distribution with real k > 0 dof."""
    if k <= 0:
        raise ValueError("k must be positive")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    out = special.gammainc(k / 2.0, x / 2.0)
    return float(out) if out.ndim == 0 else out


def beta_sample(a: float, b: float, rng: np.random.Generator, size=None):
    """Beta(a, b) draws from the supplied generator (deterministic per state)."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    return rng.beta(a, b, size=size)


@dataclass(frozen=True)
class LambdaStarNull:
    """Sorted Monte-Carlo sample of products of Beta(n_i/2, 1/2) variates."""

    dof_vector: tuple[float, ...]
    sample_count: int
    sorted_samples: np.ndarray
    seed: int

    def __post_init__(self):
        if len(self.sorted_samples) != self.sample_count:
            raise ValueError("sample count mismatch")


def lambda_star_build(dof_vector, m_samples: int = DEFAULT_LAMBDA_SAMPLES,
                      seed: int = 0) -> LambdaStarNull:
    """Build the Lambda*(n) null by sampling beta products.

    Raises InsufficientEffectiveSamplesError if any n_i <= 0.
    """
    dof = tuple(float(n) for n in np.atleast_1d(dof_vector))
    bad = [i for i, n in enumerate(dof) if n <= 0]
    if bad:
        raise InsufficientEffectiveSamplesError(
            f"non-positive effective dof at term(s) {bad}", term_indices=bad)
    if m_samples < MIN_LAMBDA_SAMPLES:
        raise ValueError(f"m_samples must be >= {MIN_LAMBDA_SAMPLES}")
    rng = np.random.default_rng(seed)
    samples = np.ones(m_samples)
    for n in dof:
        samples *= rng.beta(n / 2.0, 0.5, m_samples)
    samples.sort()
    return LambdaStarNull(dof_vector=dof, sample_count=m_samples,
                          sorted_samples=samples, seed=int(seed))


def lambda_star_pvalue(null: LambdaStarNull, statistic: float) -> float:
    """Left-tail p-value with add-one smoothing: p = (1 + #{L <= s}) / (M + 1).

    Small values of the generalized-variance ratio indicate strong
    dependence, hence the left tail.
    """
    if not 0.0 < statistic <= 1.0:
        raise ValueError("statistic must lie in (0, 1]")
    count = int(np.searchsorted(null.sorted_samples, statistic, side="right"))
    return (1 + count) / (null.sample_count + 1)
