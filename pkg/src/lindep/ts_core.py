"""Time-series containers, sample moments and lag embeddings.

Conventions: data matrices are m x T (rows = variables, columns = time).
Sample cross-covariances use the fixed denominator N = T - 1 and sum over
the valid overlap of indices only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateSeriesError, IngestionError

__all__ = [
    "TimeSeriesMatrix",
    "Partition",
    "TaperSpec",
    "AcfEstimate",
    "demean",
    "sample_cross_covariance",
    "sample_autocorrelation",
    "lag_embed",
    "load_csv",
]


@dataclass(frozen=True)
class TimeSeriesMatrix:
    """An m x T matrix of aligned, equally spaced samples."""

    data: np.ndarray
    variable_names: Optional[list[str]] = None

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim == 1:
            arr = arr[np.newaxis, :]
        if arr.ndim != 2:
            raise ValueError("data must be a 1-D or 2-D array")
        if arr.shape[0] < 1 or arr.shape[1] < 2:
            raise ValueError("need at least 1 variable and 2 time points")
        if not np.all(np.isfinite(arr)):
            raise ValueError("data contains non-finite entries")
        object.__setattr__(self, "data", arr)
        if self.variable_names is not None and len(self.variable_names) != arr.shape[0]:
            raise ValueError("variable_names length must match the number of rows")

    @property
    def n_vars(self) -> int:
        return self.data.shape[0]

    @property
    def n_obs(self) -> int:
        return self.data.shape[1]

    def row(self, i: int) -> np.ndarray:
        return self.data[i]

    def rows(self, idx: Sequence[int]) -> np.ndarray:
        return self.data[list(idx)]


@dataclass(frozen=True)
class Partition:
    """Disjoint row-index sets selecting the x, y and conditioning blocks."""

    x_rows: tuple[int, ...]
    y_rows: tuple[int, ...]
    w_rows: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "x_rows", tuple(self.x_rows))
        object.__setattr__(self, "y_rows", tuple(self.y_rows))
        object.__setattr__(self, "w_rows", tuple(self.w_rows))
        if len(self.x_rows) < 1 or len(self.y_rows) < 1:
            raise ValueError("x_rows and y_rows must be nonempty")
        all_rows = self.x_rows + self.y_rows + self.w_rows
        if len(set(all_rows)) != len(all_rows):
            raise ValueError("row index sets must be pairwise disjoint")
        if any(i < 0 for i in all_rows):
            raise ValueError("row indices must be nonnegative")

    def validate_against(self, m: int):
        top = max(self.x_rows + self.y_rows + self.w_rows)
        if top >= m:
            raise ValueError(f"row index {top} out of range for {m} variables")


@dataclass(frozen=True)
class TaperSpec:
    """Lag-window configuration for autocorrelation estimates.

    window is one of 'none', 'tukey', 'parzen'. truncation of None means
    U = T - 1 (no truncation beyond the sample length).
    """

    window: str = "none"
    truncation: Optional[int] = None

    def __post_init__(self):
        if self.window not in ("none", "tukey", "parzen"):
            raise ValueError(f"unknown lag window {self.window!r}")
        if self.truncation is not None and self.truncation < 1:
            raise ValueError("truncation must be >= 1")

    def weights(self, max_lag: int) -> np.ndarray:
        """Lag-window weights lambda(u) for u = 0..max_lag."""
        u = np.arange(max_lag + 1, dtype=float)
        if self.window == "none":
            return np.ones(max_lag + 1)
        big_u = float(self.truncation) if self.truncation is not None else float(max_lag)
        x = u / big_u
        if self.window == "tukey":
            lam = 0.5 * (1.0 + np.cos(np.pi * np.minimum(x, 1.0)))
        else:  # parzen
            lam = np.where(
                x <= 0.5,
                1.0 - 6.0 * x**2 + 6.0 * x**3,
                2.0 * (1.0 - np.minimum(x, 1.0)) ** 3,
            )
        lam[u > big_u] = 0.0
        return lam


@dataclass(frozen=True)
class AcfEstimate:
    """Sample autocorrelations r(u) for u = 0..truncation, optionally tapered."""

    values: np.ndarray
    taper: TaperSpec
    series_length: int

    @property
    def truncation(self) -> int:
        return len(self.values) - 1


def demean(series):
    """Remove the sample mean of each row (idempotent)."""
    if isinstance(series, TimeSeriesMatrix):
        return TimeSeriesMatrix(_demean_array(series.data), series.variable_names)
    return _demean_array(np.asarray(series, dtype=float))


def _demean_array(arr: np.ndarray) -> np.ndarray:
    if arr.ndim == 1:
        return arr - arr.mean()
    return arr - arr.mean(axis=1, keepdims=True)


def sample_cross_covariance(a: np.ndarray, b: np.ndarray, lag: int) -> float:
    """c_ab(u) = (T-1)^-1 sum_t a(t) b(t+u) over the valid overlap.

    Rows are assumed demeaned; a positive lag pairs a(t) with b(t+u).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("a and b must be 1-D arrays of equal length")
    t = len(a)
    if abs(lag) >= t:
        raise ValueError(f"|lag| must be < T = {t}")
    if lag >= 0:
        s = float(a[: t - lag] @ b[lag:])
    else:
        s = float(a[-lag:] @ b[: t + lag])
    return s / (t - 1)


def _acf_raw(a: np.ndarray, max_lag: int) -> np.ndarray:
    """Unnormalized lag sums sum_t a(t) a(t+u), u = 0..max_lag, via FFT."""
    t = len(a)
    nfft = 1
    while nfft < 2 * t:
        nfft *= 2
    f = np.fft.rfft(a, nfft)
    s = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1]
    return s


def sample_autocorrelation(a: np.ndarray, max_lag: Optional[int] = None,
                           taper: TaperSpec = TaperSpec()) -> AcfEstimate:
    """Sample autocorrelation r(u) = c(u)/c(0) with optional lag window.

    The row must be demeaned. Raises DegenerateSeriesError for constant
    input. Default max_lag is T - 1.
    """
    a = np.asarray(a, dtype=float)
    t = len(a)
    if max_lag is None:
        max_lag = t - 1
    if not 0 <= max_lag < t:
        raise ValueError(f"max_lag must satisfy 0 <= U < T = {t}")
    s = _acf_raw(a, max_lag)
    if s[0] <= 0.0 or not np.isfinite(s[0]):
        raise DegenerateSeriesError("zero-variance (constant) series")
    values = s / s[0]
    values = values * taper.weights(max_lag)
    values[0] = 1.0
    return AcfEstimate(values=values, taper=taper, series_length=t)


def lag_embed(data, rows: Sequence[int], p: int, shift: int = 0) -> np.ndarray:
    """Stack backshifted copies of the selected rows.

    Output row ordering is variable-major, lag-minor: row g lags 1..p,
    then row g+1 lags 1..p. Output columns correspond to times
    t = p + shift .. T - 1 and row (g, u) holds data[g, t - u]. p = 0
    yields an empty (0-row) matrix with T - shift columns.
    """
    arr = data.data if isinstance(data, TimeSeriesMatrix) else np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    t = arr.shape[1]
    if p < 0 or shift < 0:
        raise ValueError("p and shift must be nonnegative")
    if p + shift >= t:
        raise ValueError(f"p + shift must be < T = {t}")
    n_cols = t - p - shift
    if p == 0:
        return np.empty((0, t - shift))
    out = np.empty((len(rows) * p, n_cols))
    for gi, g in enumerate(rows):
        for u in range(1, p + 1):
            start = p + shift - u
            out[gi * p + (u - 1)] = arr[g, start:start + n_cols]
    return out


def load_csv(path, delimiter: str = ",") -> TimeSeriesMatrix:
    """Load a CSV with one variable per column and time down the rows.

    An optional non-numeric header row supplies variable names. Missing
    or non-finite values are a hard error.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise IngestionError(f"{path} is empty")
    first = lines[0].split(delimiter)
    names = None
    start = 0
    try:
        [float(tok) for tok in first]
    except ValueError:
        names = [tok.strip() for tok in first]
        start = 1
    rows = []
    for i, line in enumerate(lines[start:], start=start + 1):
        toks = line.split(delimiter)
        try:
            rows.append([float(tok) for tok in toks])
        except ValueError as exc:
            raise IngestionError(f"{path}:{i}: non-numeric value") from exc
    if len({len(r) for r in rows}) != 1:
        raise IngestionError(f"{path}: ragged rows")
    arr = np.array(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise IngestionError(f"{path}: missing or non-finite values")
    try:
        return TimeSeriesMatrix(arr.T, variable_names=names)
    except ValueError as exc:
        raise IngestionError(f"{path}: {exc}") from exc
