"""Least-squares residualization, partial correlation and AR/ARMA fitting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateSeriesError, FitFailedError, IllConditionedError
from .ts_core import lag_embed

__all__ = [
    "ResidualSet",
    "ArModel",
    "ArmaModel",
    "ols_residuals",
    "partial_correlation",
    "generalized_variance_logdet",
    "burg_fit",
    "partial_autocorrelation",
    "arma_fit",
    "information_criteria",
    "OrthonormalBasis",
]

RCOND = 1e-12
STABILITY_MARGIN = 1e-9


@dataclass(frozen=True)
class ResidualSet:
    """Residual rows from an intercept-augmented OLS fit."""

    residuals: np.ndarray        # r x T'
    regressor_count: int         # design columns including the intercept
    valid_length: int

    def __post_init__(self):
        if self.residuals.ndim != 2 or self.residuals.shape[1] != self.valid_length:
            raise ValueError("residuals must be r x valid_length")


@dataclass(frozen=True)
class ArModel:
    order: int
    coefficients: np.ndarray     # Phi(1..p)
    noise_variance: float

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        if self.order == 0:
            coeffs = np.empty(0)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) != self.order:
            raise ValueError("coefficient count must equal the order")
        if self.noise_variance <= 0:
            raise ValueError("noise variance must be positive")
        if self.order > 0 and not _roots_outside_unit_circle(coeffs):
            raise ValueError("unstable AR polynomial")


@dataclass(frozen=True)
class ArmaModel:
    ar: np.ndarray               # Phi(1..p)
    ma: np.ndarray               # Theta(1..q)
    noise_variance: float
    log_likelihood: float = float("nan")

    def __post_init__(self):
        ar = np.atleast_1d(np.asarray(self.ar, dtype=float)).ravel()
        ma = np.atleast_1d(np.asarray(self.ma, dtype=float)).ravel()
        object.__setattr__(self, "ar", ar)
        object.__setattr__(self, "ma", ma)
        if self.noise_variance <= 0:
            raise ValueError("noise variance must be positive")
        if len(ar) and not _roots_outside_unit_circle(ar):
            raise ValueError("unstable AR part")
        if len(ma) and not _roots_outside_unit_circle(-ma):
            raise ValueError("non-invertible MA part")


def _reflect_ma_to_invertible(theta: np.ndarray) -> np.ndarray:
    """Map an MA polynomial to its canonical invertible representation.

    Roots of 1 + theta_1 z + ... + theta_q z^q strictly inside the unit
    circle are replaced by their reciprocals, which preserves the
    autocovariance shape (up to innovation-variance rescaling). Roots on
    the circle are left alone and the result may still be
    non-invertible.
    """
    theta = np.asarray(theta, dtype=float)
    if len(theta) == 0:
        return theta
    roots = np.roots(np.concatenate([[1.0], theta])[::-1])
    inside = np.abs(roots) < 1.0 - STABILITY_MARGIN
    if not inside.any():
        return theta
    roots[inside] = 1.0 / np.conj(roots[inside])
    poly = np.real(np.poly(roots))          # z^q + c_1 z^(q-1) + ... + c_q
    # rescale so the z^0 coefficient is 1 again
    if poly[-1] == 0.0:
        return theta
    return (poly[::-1] / poly[-1])[1:]


def _roots_outside_unit_circle(phi: np.ndarray) -> bool:
    """True if all roots of 1 - phi_1 z - ... - phi_p z^p lie outside |z|=1."""
    if len(phi) == 0:
        return True
    companion = np.concatenate([[1.0], -np.asarray(phi, dtype=float)])
    roots = np.roots(companion[::-1])
    if len(roots) == 0:
        return True
    return bool(np.all(np.abs(roots) > 1.0 + STABILITY_MARGIN))


def ols_residuals(targets: np.ndarray, design: np.ndarray) -> ResidualSet:
    """Residualize each target row on the design rows plus an intercept.

    An empty (0-row) design reduces to demeaning. Raises
    IllConditionedError when the augmented design is rank deficient at
    reciprocal condition 1e-12.
    """
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    design = np.asarray(design, dtype=float)
    if design.size == 0:
        design = np.empty((0, targets.shape[1]))
    design = np.atleast_2d(design)
    t = targets.shape[1]
    if design.shape[0] > 0 and design.shape[1] != t:
        raise ValueError("target and design column counts must match")
    a = np.vstack([np.ones((1, t)), design]).T          # T x (d+1)
    coef, _, rank, _ = np.linalg.lstsq(a, targets.T, rcond=RCOND)
    if rank < a.shape[1]:
        raise IllConditionedError(
            f"design rank {rank} < {a.shape[1]} columns (rcond {RCOND:g})")
    resid = targets - (a @ coef).T
    return ResidualSet(residuals=resid, regressor_count=a.shape[1], valid_length=t)


def partial_correlation(x: np.ndarray, y: np.ndarray, w: Optional[np.ndarray] = None) -> float:
    """Correlation of the OLS residuals of x and y after removing w."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if w is None:
        w = np.empty((0, len(x)))
    res = ols_residuals(np.vstack([x, y]), w)
    ex, ey = res.residuals
    nx = float(np.linalg.norm(ex))
    ny = float(np.linalg.norm(ey))
    if nx == 0.0 or ny == 0.0:
        raise DegenerateSeriesError("zero residual variance")
    r = float(ex @ ey) / (nx * ny)
    return min(1.0, max(-1.0, r))


def generalized_variance_logdet(residuals: ResidualSet) -> float:
    """log of the determinant of the residual sample covariance.

    Computed from a Cholesky factorization; raises DegenerateSeriesError
    if the covariance is not positive definite.
    """
    e = residuals.residuals
    s = (e @ e.T) / (residuals.valid_length - 1)
    try:
        chol = np.linalg.cholesky(s)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSeriesError("residual covariance not positive definite") from exc
    return float(2.0 * np.sum(np.log(np.diag(chol))))


def _burg_recursion(x: np.ndarray, max_order: int):
    """Burg reflection-coefficient recursion.

    Returns (orders' prediction error variances e[0..P], list of AR
    coefficient vectors phi_m for m = 0..P).
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    x = x - x.mean()
    e0 = float(x @ x) / n
    if e0 <= 0:
        raise DegenerateSeriesError("zero-variance series")
    variances = [e0]
    coeffs = [np.empty(0)]
    f = x.copy()
    b = x.copy()
    a = np.empty(0)                # prediction-error filter tail: [a_1..a_m]
    for m in range(1, max_order + 1):
        ff = f[m:]
        bb = b[m - 1:n - 1]
        denom = float(ff @ ff + bb @ bb)
        if denom <= 0:
            break
        k = -2.0 * float(ff @ bb) / denom
        a = np.concatenate([a + k * a[::-1], [k]])
        e_new = variances[-1] * (1.0 - k * k)
        if e_new <= 0:
            break
        f_new = ff + k * bb
        b_new = bb + k * ff
        f[m:] = f_new
        b[m:] = b_new
        variances.append(e_new)
        coeffs.append(-a.copy())   # Phi_u = -a_u
    return variances, coeffs


def _order_penalty(criterion: str, m: int, n: int) -> float:
    if criterion == "aic":
        return 2.0 * m
    if criterion == "aicc":
        if n - m - 1 <= 0:
            return float("inf")
        return 2.0 * m + 2.0 * m * (m + 1) / (n - m - 1)
    if criterion == "bic":
        return m * float(np.log(n))
    raise ValueError(f"unknown criterion {criterion!r}")


def burg_fit(x: np.ndarray, max_order: Optional[int] = None,
             criterion: str = "aic") -> tuple[int, ArModel]:
    """Fit an AR model by Burg's method.

    criterion selects the order: "aic", "aicc" or "bic" score the Burg
    prediction-error variance for every order 0..max_order;
    "reflection" keeps adding lags until the next reflection
    coefficient is insignificant at the 5% level (|k| <= 1.96/sqrt(T)),
    the rule native to the Burg recursion. Default max_order is
    min(200, T // 4).
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if max_order is None:
        max_order = min(200, n // 4)
    if n <= 2 * max_order:
        raise ValueError(f"need T > 2 * max_order, got T={n}, max_order={max_order}")
    variances, coeffs = _burg_recursion(x, max_order)
    if criterion == "reflection":
        threshold = 1.96 / np.sqrt(n)
        best = 0
        for m in range(1, len(coeffs)):
            if abs(coeffs[m][-1]) <= threshold:
                break
            best = m
    else:
        scores = [n * np.log(v) + _order_penalty(criterion, m, n)
                  for m, v in enumerate(variances)]
        best = int(np.argmin(scores))
    model = ArModel(order=best, coefficients=coeffs[best],
                    noise_variance=variances[best])
    return best, model


def partial_autocorrelation(x: np.ndarray, max_lag: int) -> np.ndarray:
    """alpha(u) for u = 1..max_lag.

    alpha(u) is the partial correlation between x(t) and x(t-u) given the
    intervening lags 1..u-1, each computed over its own aligned window.
    """
    x = np.asarray(x, dtype=float)
    if max_lag < 1 or max_lag >= len(x) - 1:
        raise ValueError("max_lag must satisfy 1 <= U < T - 1")
    out = np.empty(max_lag)
    for u in range(1, max_lag + 1):
        emb = lag_embed(x, [0], u, shift=0)     # lags 1..u, aligned at t >= u
        target = x[u:]
        out[u - 1] = partial_correlation(target, emb[u - 1], emb[:u - 1])
    return out


def arma_fit(x: np.ndarray, p: int, q: int) -> ArmaModel:
    """Two-stage Hannan-Rissanen ARMA(p, q) estimate.

    Stage one fits a long AR by Burg to proxy the innovations; stage two
    regresses x(t) on its own lags and lagged innovation proxies. Raises
    FitFailedError for unstable or non-invertible results.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if p < 0 or q < 0 or p + q == 0:
        raise ValueError("need p, q >= 0 with p + q >= 1")
    if n < 20 * (p + q):
        raise ValueError(f"need T >= 20 * (p + q), got T={n}")
    x = x - x.mean()
    if float(x @ x) == 0.0:
        raise DegenerateSeriesError("zero-variance series")
    if q == 0:
        variances, coeffs = _burg_recursion(x, p)
        sigma2 = variances[p] if len(variances) > p else variances[-1]
        phi = coeffs[p] if len(coeffs) > p else coeffs[-1]
        loglik = -0.5 * n * (np.log(2 * np.pi * sigma2) + 1.0)
        try:
            return ArmaModel(ar=phi, ma=np.empty(0), noise_variance=sigma2,
                             log_likelihood=loglik)
        except ValueError as exc:
            raise FitFailedError(str(exc)) from exc
    long_order = min(max(20, 2 * (p + q)), n // 4)
    variances, coeffs = _burg_recursion(x, long_order)
    phi_long = coeffs[-1]
    m = len(phi_long)
    # innovation proxies from the long AR fit, valid for t >= m
    innov = np.zeros(n)
    pred = np.zeros(n - m)
    for u in range(1, m + 1):
        pred += phi_long[u - 1] * x[m - u:n - u]
    innov[m:] = x[m:] - pred
    start = m + max(p, q)
    if n - start < 10 * (p + q):
        raise FitFailedError("too few observations after long-AR stage")
    rows = [x[start - u:n - u] for u in range(1, p + 1)]
    rows += [innov[start - u:n - u] for u in range(1, q + 1)]
    design = np.vstack(rows)
    target = x[start:]
    try:
        res = ols_residuals(target, design)
    except IllConditionedError as exc:
        raise FitFailedError(str(exc)) from exc
    # recover the coefficients from the same normal equations
    a = np.vstack([np.ones((1, len(target))), design]).T
    coef, _, _, _ = np.linalg.lstsq(a, target, rcond=RCOND)
    phi = coef[1:1 + p]
    theta = _reflect_ma_to_invertible(coef[1 + p:1 + p + q])
    resid = res.residuals[0]
    sigma2 = float(resid @ resid) / len(resid)
    if sigma2 <= 0:
        raise FitFailedError("degenerate innovation variance")
    loglik = -0.5 * len(resid) * (np.log(2 * np.pi * sigma2) + 1.0)
    try:
        return ArmaModel(ar=phi, ma=theta, noise_variance=sigma2,
                         log_likelihood=loglik)
    except ValueError as exc:
        raise FitFailedError(str(exc)) from exc


def information_criteria(loglik: float, n_params: int, n_obs: int) -> tuple[float, float, float]:
    """(AIC, AICc, BIC) for a fitted model."""
    if n_obs <= n_params + 1:
        raise ValueError("AICc requires T > k + 1")
    aic = -2.0 * loglik + 2.0 * n_params
    aicc = aic + 2.0 * n_params * (n_params + 1) / (n_obs - n_params - 1)
    bic = -2.0 * loglik + n_params * float(np.log(n_obs))
    return aic, aicc, bic


class OrthonormalBasis:
    """Growing orthonormal basis for nested-regression chains.

    Columns are added one block at a time and orthonormalized against the
    existing basis (classical Gram-Schmidt applied twice, numerically
    equivalent to a QR factorization). Near-dependent columns raise
    IllConditionedError.
    """

    def __init__(self, n_obs: int, include_intercept: bool = True,
                 rtol: float = 1e-10):
        self.n_obs = n_obs
        self.rtol = rtol
        self._q = np.empty((n_obs, 0))
        if include_intercept:
            self._q = np.ones((n_obs, 1)) / np.sqrt(n_obs)

    @property
    def n_cols(self) -> int:
        return self._q.shape[1]

    def residual(self, v: np.ndarray) -> np.ndarray:
        """Component of v orthogonal to the current basis."""
        r = v - self._q @ (self._q.T @ v)
        r -= self._q @ (self._q.T @ r)
        return r

    def add(self, v: np.ndarray):
        norm0 = float(np.linalg.norm(v))
        r = self.residual(v)
        norm = float(np.linalg.norm(r))
        if norm0 == 0.0 or norm <= self.rtol * norm0:
            raise IllConditionedError("new regressor is (near) linearly dependent")
        self._q = np.hstack([self._q, (r / norm)[:, np.newaxis]])

    def add_block(self, block: np.ndarray):
        for row in np.atleast_2d(block):
            self.add(row)
