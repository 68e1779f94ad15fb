"""Least-squares AR comparators: per-order conditional OLS, AIC selection, full model.

Every order is fitted on the same residual range ``i = q_align+1..n`` so that
residual sums of squares, and hence AIC values, are comparable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_toeplitz

from .core import RiskReport, TimeSeries, ValidationError, lag_windows, mean_squared_residual


@dataclass(frozen=True)
class ArFit:
    order: int
    coeffs: tuple[float, ...]
    intercept: float
    rss: float
    n_eff: int

    @property
    def aic(self) -> float:
        # constant terms dropped; n_eff * log(0) -> -inf for an exact fit
        with np.errstate(divide="ignore"):
            return self.n_eff * float(np.log(self.rss / self.n_eff)) + 2.0 * (self.order + 1)


def ols_ar_fit(series: TimeSeries, order: int, q_align: int) -> ArFit:
    if not 0 <= order <= q_align:
        raise ValidationError(f"need 0 <= order <= q_align, got order={order}, q_align={q_align}")
    if q_align >= series.n:
        raise ValidationError(f"q_align={q_align} must be smaller than the series length {series.n}")
    if q_align == 0:
        y = series.values.copy()
        windows = np.empty((y.size, 0))
    else:
        y, windows = lag_windows(series.values, q_align)
    design = np.column_stack([np.ones(y.size), windows[:, :order]])
    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise ValidationError(f"rank-deficient design for AR({order}) fit")
    resid = y - design @ beta
    return ArFit(order, tuple(beta[1:].tolist()), float(beta[0]), float(resid @ resid), int(y.size))


def aic_select(series: TimeSeries, max_order: int, q_align: int) -> ArFit:
    """Order in ``0..max_order`` minimising AIC; ties go to the smaller order."""
    if max_order > q_align:
        raise ValidationError("max_order must not exceed q_align")
    best = None
    for order in range(max_order + 1):
        fit = ols_ar_fit(series, order, q_align)
        if best is None or fit.aic < best.aic:
            best = fit
    return best


def predict_ar(fit: ArFit, window) -> float:
    w = np.asarray(window, dtype=float).ravel()
    if w.size < fit.order:
        raise ValidationError(f"window of length {w.size} is shorter than the order {fit.order}")
    return fit.intercept + float(np.dot(fit.coeffs, w[:fit.order]))


def ar_holdout_risk(fit: ArFit, test: TimeSeries, q: int) -> RiskReport:
    """Test risk over ``i = q+1..n``, the same residual range as the Gibbs predictor."""
    if fit.order > q:
        raise ValidationError("fit order exceeds the evaluation window")
    targets, windows = lag_windows(test.values, q)
    preds = fit.intercept + windows[:, :fit.order] @ np.asarray(fit.coeffs)
    return mean_squared_residual(targets, preds)


def yule_walker_path(series: TimeSeries, max_order: int) -> list[ArFit]:
    """Yule-Walker fits of orders ``0..max_order`` on the demeaned series.

    Mirrors the default ``ar()`` pipeline of R: autocovariances with divisor
    n, Levinson recursion per order, and ``rss`` reported as ``n`` times the
    innovation variance so that :attr:`ArFit.aic` ranks orders like R's AIC.
    """
    x = series.values
    n = x.size
    if not 0 <= max_order < n:
        raise ValidationError(f"need 0 <= max_order < n, got {max_order}")
    mu = float(x.mean())
    xc = x - mu
    acov = np.array([xc[: n - k] @ xc[k:] / n for k in range(max_order + 1)])
    if not acov[0] > 0:
        raise ValidationError("Yule-Walker fit needs a non-constant series")
    fits = []
    for order in range(max_order + 1):
        if order == 0:
            a = np.zeros(0)
            v = acov[0]
        else:
            a = solve_toeplitz(acov[:order], acov[1:order + 1])
            v = acov[0] - a @ acov[1:order + 1]
        fits.append(ArFit(order, tuple(a.tolist()), mu * (1.0 - a.sum()), float(n * v), n))
    return fits


def aic_select_yw(series: TimeSeries, max_order: int) -> ArFit:
    """Yule-Walker counterpart of :func:`aic_select`; ties go to the smaller order."""
    fits = yule_walker_path(series, max_order)
    return min(fits, key=lambda f: (f.aic, f.order))
