"""Predictor dictionaries ``g_1, ..., g_p`` acting on a window of q past values.

Function ordering
-----------------
ar_linear
    ``g_j(w) = w_j``: index 0 is lag 1 (the most recent value), index q-1 is lag q.
sign_pattern
    ``p = 2**q`` indicators. The active index of a window is
    ``sum_i [w_i <= 0] * 2**i`` with ``i = 0`` for the most recent value, so
    index 0 is the all-positive pattern and index ``2**q - 1`` the all
    non-positive one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import SparseParam, ValidationError

MAX_SIGN_PATTERN_Q = 20

KINDS = ("ar_linear", "sign_pattern", "custom")


@dataclass(frozen=True)
class PredictorBasis:
    p: int
    q: int
    kind: str
    functions: tuple[Callable[[np.ndarray], float], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown basis kind {self.kind!r}")
        if self.q < 1 or self.p < 1:
            raise ValidationError("basis needs q >= 1 and p >= 1")
        if self.kind == "ar_linear" and self.p != self.q:
            raise ValidationError("ar_linear basis has p == q")
        if self.kind == "sign_pattern" and self.p != 2 ** self.q:
            raise ValidationError("sign_pattern basis has p == 2**q")
        if self.kind == "custom" and len(self.functions) != self.p:
            raise ValidationError("custom basis needs exactly p functions")

    def _window(self, window) -> np.ndarray:
        w = np.asarray(window, dtype=float).ravel()
        if w.size != self.q:
            raise ValidationError(f"window has length {w.size}, expected {self.q}")
        return w

    def pattern_index(self, windows: np.ndarray) -> np.ndarray:
        """Active sign-pattern index for each row of ``windows``."""
        nonpos = (np.atleast_2d(windows) <= 0.0).astype(np.int64)
        return nonpos @ (1 << np.arange(self.q, dtype=np.int64))

    def evaluate(self, window) -> np.ndarray:
        """All ``p`` dictionary values at a single window."""
        return self.design(self._window(window)[None, :])[0]

    def design(self, windows: np.ndarray) -> np.ndarray:
        """Matrix with entry ``(t, j) = g_j(windows[t])``."""
        windows = np.atleast_2d(np.asarray(windows, dtype=float))
        if windows.shape[1] != self.q:
            raise ValidationError(f"windows have length {windows.shape[1]}, expected {self.q}")
        if self.kind == "ar_linear":
            return windows.copy()
        if self.kind == "sign_pattern":
            out = np.zeros((windows.shape[0], self.p))
            out[np.arange(windows.shape[0]), self.pattern_index(windows)] = 1.0
            return out
        return np.array([[g(w) for g in self.functions] for w in windows], dtype=float)

    def predict(self, theta: SparseParam, window) -> float:
        if theta.p != self.p:
            raise ValidationError(f"theta has dimension {theta.p}, basis has {self.p} functions")
        w = self._window(window)
        if self.kind == "ar_linear":
            return float(sum(c * w[j] for j, c in zip(theta.support, theta.coeffs)))
        if self.kind == "sign_pattern":
            return theta[int(self.pattern_index(w)[0])]
        return float(sum(c * self.functions[j](w) for j, c in zip(theta.support, theta.coeffs)))

    def predict_many(self, theta: SparseParam, windows: np.ndarray) -> np.ndarray:
        if theta.p != self.p:
            raise ValidationError(f"theta has dimension {theta.p}, basis has {self.p} functions")
        windows = np.atleast_2d(np.asarray(windows, dtype=float))
        if windows.shape[1] != self.q:
            raise ValidationError(f"windows have length {windows.shape[1]}, expected {self.q}")
        if not theta.support:
            return np.zeros(windows.shape[0])
        idx = list(theta.support)
        coeffs = np.asarray(theta.coeffs)
        if self.kind == "ar_linear":
            return windows[:, idx] @ coeffs
        if self.kind == "sign_pattern":
            return theta.to_dense()[self.pattern_index(windows)]
        cols = np.array([[self.functions[j](w) for j in idx] for w in windows], dtype=float)
        return cols @ coeffs


def make_basis(kind: str, q: int, functions: Sequence[Callable[[np.ndarray], float]] = ()) -> PredictorBasis:
    if q < 1:
        raise ValidationError("window length q must be >= 1")
    if kind == "ar_linear":
        return PredictorBasis(q, q, kind)
    if kind == "sign_pattern":
        if q > MAX_SIGN_PATTERN_Q:
            raise ValidationError(f"sign_pattern basis limited to q <= {MAX_SIGN_PATTERN_Q}, got {q}")
        return PredictorBasis(2 ** q, q, kind)
    if kind == "custom":
        return PredictorBasis(len(functions), q, kind, tuple(functions))
    raise ValidationError(f"unknown basis kind {kind!r}")


def predict(basis: PredictorBasis, theta: SparseParam, window) -> float:
    """``sum_j theta_j g_j(window)`` with the window ordered most-recent-first."""
    return basis.predict(theta, window)
