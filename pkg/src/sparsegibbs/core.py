"""Shared domain types and one-step-ahead risk evaluation.

Windows are always ordered most-recent-first: the residual at time ``i``
compares ``X_i`` with a prediction built from ``(X_{i-1}, ..., X_{i-q})``.
Support indices of :class:`SparseParam` are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

if TYPE_CHECKING:
    from .basis import PredictorBasis


class ValidationError(ValueError):
    """Invalid user input (bad shapes, out-of-range parameters, short series)."""


@dataclass(frozen=True)
class TimeSeries:
    values: np.ndarray
    n: int = field(init=False)
    b_emp: float = field(init=False)
    var_emp: float = field(init=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size < 1:
            raise ValidationError("a time series needs at least one value")
        if not np.all(np.isfinite(values)):
            raise ValidationError("time series contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "n", int(values.size))
        object.__setattr__(self, "b_emp", float(np.max(np.abs(values))))
        # population convention (divisor n)
        object.__setattr__(self, "var_emp", float(np.var(values)))

    def __len__(self):
        return self.n

    def split(self, n_train: int) -> tuple["TimeSeries", "TimeSeries"]:
        """First ``n_train`` values and the remainder, as two series."""
        if not 0 < n_train < self.n:
            raise ValidationError(f"cannot split a series of length {self.n} at {n_train}")
        return TimeSeries(self.values[:n_train]), TimeSeries(self.values[n_train:])


@dataclass(frozen=True)
class SparseParam:
    """A vector of R^p stored as (support, coefficients on the support).

    Zero coefficients are dropped from the support on construction and the
    support is kept sorted, so two equal vectors have equal representations.
    """

    p: int
    support: tuple[int, ...] = ()
    coeffs: tuple[float, ...] = ()
    l1: float = field(init=False)

    def __post_init__(self):
        if self.p < 1:
            raise ValidationError("ambient dimension p must be >= 1")
        support = tuple(int(j) for j in self.support)
        coeffs = tuple(float(c) for c in self.coeffs)
        if len(support) != len(coeffs):
            raise ValidationError("support and coeffs must have the same length")
        if len(set(support)) != len(support):
            raise ValidationError("duplicate support index")
        for j in support:
            if not 0 <= j < self.p:
                raise ValidationError(f"support index {j} outside 0..{self.p - 1}")
        pairs = sorted((j, c) for j, c in zip(support, coeffs) if c != 0.0)
        object.__setattr__(self, "support", tuple(j for j, _ in pairs))
        object.__setattr__(self, "coeffs", tuple(c for _, c in pairs))
        object.__setattr__(self, "l1", float(sum(abs(c) for _, c in pairs)))

    @classmethod
    def zeros(cls, p: int) -> "SparseParam":
        return cls(p)

    @classmethod
    def from_dense(cls, values: Iterable[float]) -> "SparseParam":
        values = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
        support = np.flatnonzero(values)
        return cls(int(values.size), tuple(support.tolist()), tuple(values[support].tolist()))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.p)
        if self.support:
            out[list(self.support)] = self.coeffs
        return out

    @property
    def size(self) -> int:
        """Support size |I|."""
        return len(self.support)

    def __getitem__(self, j: int) -> float:
        try:
            return self.coeffs[self.support.index(j)]
        except ValueError:
            if not 0 <= j < self.p:
                raise IndexError(j) from None
            return 0.0


@dataclass(frozen=True)
class RiskReport:
    empirical_risk: float
    n_terms: int


def lag_windows(values: Sequence[float] | np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Targets ``X_{q+1..n}`` and the matching windows, most recent value first.

    Row ``t`` of the window matrix is ``(X_{i-1}, ..., X_{i-q})`` for target
    ``X_i`` with ``i = q + 1 + t`` (1-based time).
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    if q < 1:
        raise ValidationError("window length q must be >= 1")
    if n <= q:
        raise ValidationError(f"series of length {n} is too short for window length {q}")
    m = n - q
    windows = np.empty((m, q))
    for lag in range(1, q + 1):
        windows[:, lag - 1] = x[q - lag:n - lag]
    return x[q:].copy(), windows


def mean_squared_residual(targets: np.ndarray, predictions: np.ndarray) -> RiskReport:
    resid = np.asarray(targets, dtype=float) - np.asarray(predictions, dtype=float)
    return RiskReport(float(np.mean(resid * resid)), int(resid.size))


def _check_compatible(basis: "PredictorBasis", theta: SparseParam, q: int) -> None:
    if basis.q != q:
        raise ValidationError(f"basis window length {basis.q} differs from q={q}")
    if theta.p != basis.p:
        raise ValidationError(f"theta has dimension {theta.p}, basis has {basis.p} functions")


def empirical_risk(series: TimeSeries, basis: "PredictorBasis", theta: SparseParam, q: int) -> RiskReport:
    """Mean squared one-step error of ``f_theta`` over ``i = q+1..n``."""
    _check_compatible(basis, theta, q)
    targets, windows = lag_windows(series.values, q)
    return mean_squared_residual(targets, basis.predict_many(theta, windows))


def holdout_risk(theta: SparseParam, basis: "PredictorBasis", test: TimeSeries, q: int) -> RiskReport:
    """Empirical risk on a held-out segment; the Monte Carlo stand-in for the prevision risk."""
    return empirical_risk(test, basis, theta, q)
