"""Synthetic process generation and preprocessing.

VAR(1) ground-truth simulation, FIR least-squares and Butterworth
low-pass designs, causal and zero-phase filtering, and prewhitening
(fit a parametric model on one row, inverse-filter both rows).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import signal

from .errors import ConfigError, FitFailedError
from .linreg import arma_fit, burg_fit, information_criteria
from .ts_core import Partition, TimeSeriesMatrix, demean

__all__ = [
    "VarSpec",
    "FilterSpec",
    "PREWHITEN_MODELS",
    "var_simulate",
    "fir_ls_design",
    "butterworth_design",
    "bandpass_design",
    "filter_apply",
    "prewhiten",
]

DEFAULT_BURN_IN = 1000

PREWHITEN_MODELS = ("ar1", "arma11", "arp_burg", "arp_aicc", "arp_bic",
                    "armapq_bic")


@dataclass(frozen=True)
class VarSpec:
    """First-order VAR ground truth with diagonal blocks.

    x, y and w rows are independent AR(1) processes except for an
    optional y1 -> x1 cross coefficient phi_xy at lag 1. Innovations are
    unit-variance Gaussian; burn_in initial samples are discarded.
    """

    k: int = 1
    l: int = 1
    c: int = 0
    phi_x: float = 0.3
    phi_y: float = -0.8
    phi_w: float = 0.4
    phi_xy: float = 0.0
    t: int = 512
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        if self.k < 1 or self.l < 1 or self.c < 0:
            raise ValueError("need k >= 1, l >= 1, c >= 0")
        if self.t < 2 or self.burn_in < 0:
            raise ValueError("need t >= 2 and burn_in >= 0")
        for phi in (self.phi_x, self.phi_y, self.phi_w):
            if abs(phi) >= 1.0:
                raise ValueError("diagonal AR coefficients must satisfy |phi| < 1")

    @property
    def n_vars(self) -> int:
        return self.k + self.l + self.c

    def partition(self) -> Partition:
        return Partition(x_rows=tuple(range(self.k)),
                         y_rows=tuple(range(self.k, self.k + self.l)),
                         w_rows=tuple(range(self.k + self.l, self.n_vars)))


@dataclass(frozen=True)
class FilterSpec:
    """Low-pass filter configuration.

    kind is 'fir' (linear-phase least-squares) or 'butterworth'. cutoff
    is a fraction of the Nyquist frequency (0.5 means pi/2 rad/sample).
    order 0 means no filtering.
    """

    kind: str = "fir"
    order: int = 0
    cutoff: float = 0.5

    def __post_init__(self):
        if self.kind not in ("fir", "butterworth"):
            raise ValueError(f"unknown filter kind {self.kind!r}")
        if self.order < 0:
            raise ValueError("order must be >= 0")
        if not 0.0 < self.cutoff < 1.0:
            raise ValueError("cutoff must be a Nyquist fraction in (0, 1)")
        if self.kind == "fir" and self.order % 2 != 0:
            raise ValueError("FIR order must be even (symmetric, odd tap count)")


def var_simulate(spec: VarSpec, seed) -> TimeSeriesMatrix:
    """Simulate the VAR(1) ground truth; deterministic per seed.

    Accepts an integer seed, a SeedSequence, or a Generator.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = spec.t + spec.burn_in
    eps = rng.standard_normal((spec.n_vars, n))
    out = np.empty_like(eps)
    part = spec.partition()
    for i in part.y_rows:
        out[i] = signal.lfilter([1.0], [1.0, -spec.phi_y], eps[i])
    for i in part.w_rows:
        out[i] = signal.lfilter([1.0], [1.0, -spec.phi_w], eps[i])
    for i in part.x_rows:
        drive = eps[i]
        if i == part.x_rows[0] and spec.phi_xy != 0.0:
            y1 = out[part.y_rows[0]]
            drive = drive + spec.phi_xy * np.concatenate([[0.0], y1[:-1]])
        out[i] = signal.lfilter([1.0], [1.0, -spec.phi_x], drive)
    names = ([f"x{i+1}" for i in range(spec.k)]
             + [f"y{i+1}" for i in range(spec.l)]
             + [f"w{i+1}" for i in range(spec.c)])
    return TimeSeriesMatrix(out[:, spec.burn_in:], variable_names=names)


def fir_ls_design(order: int, cutoff: float = 0.5) -> np.ndarray:
    """Symmetric least-squares low-pass taps (order + 1 of them).

    Passband [0, 0.95 cutoff], stopband [1.05 cutoff, Nyquist], unit and
    zero desired response with equal weights; taps rescaled to exact unit
    DC gain. order 0 is a passthrough.
    """
    if order < 0 or order % 2 != 0:
        raise ValueError("order must be a nonnegative even integer")
    if not 0.0 < cutoff < 0.95:
        raise ValueError("cutoff must lie in (0, 0.95) of Nyquist")
    if order == 0:
        return np.array([1.0])
    bands = [0.0, 0.95 * cutoff, 1.05 * cutoff, 1.0]
    taps = signal.firls(order + 1, bands, [1.0, 1.0, 0.0, 0.0], fs=2.0)
    return taps / taps.sum()


def butterworth_design(order: int, cutoff: float = 0.5) -> np.ndarray:
    """Low-pass Butterworth as second-order sections."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if not 0.0 < cutoff < 1.0:
        raise ValueError("cutoff must be a Nyquist fraction in (0, 1)")
    return signal.butter(order, cutoff, btype="low", output="sos")


def bandpass_design(order: int, low: float, high: float) -> np.ndarray:
    """Band-pass Butterworth (second-order sections) for ingestion cleanup."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if not 0.0 < low < high < 1.0:
        raise ValueError("need 0 < low < high < 1 (Nyquist fractions)")
    return signal.butter(order, [low, high], btype="bandpass", output="sos")


def filter_apply(series, spec: FilterSpec, zero_phase: bool = False):
    """Filter each row; causal single-pass by default, zero-phase optional.

    Causal filtering uses zero initial conditions and keeps the length T.
    Returns the same container type it was given.
    """
    is_tsm = isinstance(series, TimeSeriesMatrix)
    arr = series.data if is_tsm else np.atleast_2d(np.asarray(series, dtype=float))
    if spec.order == 0:
        out = arr.copy()
    elif spec.kind == "fir":
        taps = fir_ls_design(spec.order, spec.cutoff)
        if zero_phase:
            out = signal.filtfilt(taps, [1.0], arr, axis=1)
        else:
            out = signal.lfilter(taps, [1.0], arr, axis=1)
    else:
        sos = butterworth_design(spec.order, spec.cutoff)
        if zero_phase:
            out = signal.sosfiltfilt(sos, arr, axis=1)
        else:
            out = signal.sosfilt(sos, arr, axis=1)
    if is_tsm:
        return TimeSeriesMatrix(out, series.variable_names)
    return out if np.asarray(series).ndim > 1 else out[0]


def _fit_prewhiten_model(x: np.ndarray, model: str,
                         burg_max_order: Optional[int]):
    """Returns (phi, theta) for the chosen model family fit on x."""
    if model == "ar1":
        fit = arma_fit(x, 1, 0)
        return fit.ar, fit.ma
    if model == "arma11":
        fit = arma_fit(x, 1, 1)
        return fit.ar, fit.ma
    if model in ("arp_burg", "arp_aicc", "arp_bic"):
        criterion = {"arp_burg": "reflection", "arp_aicc": "aicc",
                     "arp_bic": "bic"}[model]
        try:
            _, fit = burg_fit(x, max_order=burg_max_order, criterion=criterion)
        except ValueError as exc:
            raise FitFailedError(str(exc)) from exc
        return fit.coefficients, np.empty(0)
    if model == "armapq_bic":
        best = None
        best_bic = np.inf
        n = len(x)
        for p in range(1, 6):
            for q in range(1, 6):
                try:
                    fit = arma_fit(x, p, q)
                except (FitFailedError, ValueError):
                    continue
                _, _, bic = information_criteria(fit.log_likelihood,
                                                 p + q + 1, n)
                if bic < best_bic:
                    best, best_bic = fit, bic
        if best is None:
            raise FitFailedError("every ARMA(p, q) candidate failed to fit")
        return best.ar, best.ma
    raise ConfigError(f"unknown prewhitening model {model!r}")


def prewhiten(x, y, model: str = "ar1",
              burg_max_order: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Fit a model on x and apply the identical inverse filter to x and y.

    The inverse ARMA filter maps a series s to
    lfilter([1, -phi_1..-phi_p], [1, theta_1..theta_q], s); the first
    max(p, q) samples (initial transient) are trimmed from both outputs.
    Raises FitFailedError if the model cannot be fit stably.
    """
    x = demean(np.asarray(x, dtype=float))
    y = demean(np.asarray(y, dtype=float))
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be aligned 1-D rows")
    phi, theta = _fit_prewhiten_model(x, model, burg_max_order)
    b = np.concatenate([[1.0], -phi])
    a = np.concatenate([[1.0], theta])
    trim = max(len(phi), len(theta))
    xw = signal.lfilter(b, a, x)[trim:]
    yw = signal.lfilter(b, a, y)[trim:]
    return xw, yw
