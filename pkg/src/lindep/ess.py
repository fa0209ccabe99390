"""Effective sample size from the first-order Bartlett variance formula.

The variance of a sample correlation between two independent but
autocorrelated series is approximated from products of their sample
autocorrelations; the effective sample size is eta = 1 + 1/variance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ts_core import AcfEstimate, TaperSpec, sample_autocorrelation

__all__ = ["EssEstimate", "bartlett_variance", "effective_sample_size", "effective_dof"]

# Floor applied when the truncated Bartlett sum goes non-positive; keeps the
# estimate usable instead of crashing the trial (floor is 1e-6 / T).
VARIANCE_FLOOR_SCALE = 1e-6


@dataclass(frozen=True)
class EssEstimate:
    variance_hat: float
    eta_hat: float
    taper_used: TaperSpec
    series_length: int
    clamped: bool = False

    def __post_init__(self):
        if self.variance_hat <= 0:
            raise ValueError("variance_hat must be positive")


def bartlett_variance(acf_a: AcfEstimate, acf_b: AcfEstimate, t: int) -> float:
    """sigma^2 = T^-1 (1 + 2 sum_u ((T-u)/T) r_aa(u) r_bb(u)).

    The sum runs over u = 1..U where U is the common truncation of the two
    autocorrelation estimates. The result is clamped below at 1e-6/T.
    """
    if acf_a.truncation != acf_b.truncation or acf_a.series_length != acf_b.series_length:
        raise ValueError("autocorrelation estimates must share T and truncation")
    if acf_a.series_length != t:
        raise ValueError("t must match the ACF series length")
    u = np.arange(1, acf_a.truncation + 1, dtype=float)
    core = float(np.dot((t - u) / t, acf_a.values[1:] * acf_b.values[1:]))
    var = (1.0 + 2.0 * core) / t
    return max(var, VARIANCE_FLOOR_SCALE / t)


def effective_sample_size(residual_a: np.ndarray, residual_b: np.ndarray,
                          taper: TaperSpec = TaperSpec()) -> EssEstimate:
    """eta = 1 + 1/sigma^2 with sigma^2 from the residuals' autocorrelations."""
    a = np.asarray(residual_a, dtype=float)
    b = np.asarray(residual_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("residual rows must be aligned")
    t = len(a)
    max_lag = t - 1
    if taper.truncation is not None:
        max_lag = min(max_lag, taper.truncation)
    acf_a = sample_autocorrelation(a, max_lag, taper)
    acf_b = sample_autocorrelation(b, max_lag, taper)
    var = bartlett_variance(acf_a, acf_b, t)
    clamped = var == VARIANCE_FLOOR_SCALE / t
    return EssEstimate(variance_hat=var, eta_hat=1.0 + 1.0 / var,
                       taper_used=taper, series_length=t, clamped=clamped)


def effective_dof(eta_hat: float, conditioning_dim: int) -> float:
    """eta - c - 2; may be non-positive, callers must check before testing."""
    return eta_hat - conditioning_dim - 2.0
