"""Simulators for the AR, MA and cos-sin autoregressive example processes.

All randomness goes through numpy's PCG64 generator seeded by an integer.
Experiments derive one integer seed per replication with
:func:`substream_seed`, which hashes ``(master_seed, *key)`` through
``numpy.random.SeedSequence``; the result depends only on the key, never on
scheduling order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import lfilter

from .core import TimeSeries, ValidationError

STATIONARY = "stationary"
NON_STATIONARY = "non_stationary"

DEFAULT_BURN_IN = 1000
DEFAULT_UNIFORM_A = 0.70
DEFAULT_GAUSSIAN_SIGMA = 0.4


@dataclass(frozen=True)
class InnovationSpec:
    kind: str = "uniform"
    a: float = DEFAULT_UNIFORM_A
    sigma: float = DEFAULT_GAUSSIAN_SIGMA

    def __post_init__(self):
        if self.kind == "uniform":
            # a == 0 is allowed as the degenerate noiseless case
            if not self.a >= 0:
                raise ValidationError(f"uniform half-width must be >= 0, got {self.a}")
        elif self.kind == "gaussian":
            if not self.sigma >= 0:
                raise ValidationError(f"gaussian sigma must be >= 0, got {self.sigma}")
        else:
            raise ValidationError(f"unknown innovation kind {self.kind!r}")

    @property
    def variance(self) -> float:
        return self.a ** 2 / 3.0 if self.kind == "uniform" else self.sigma ** 2

    @property
    def bound(self) -> float:
        return self.a if self.kind == "uniform" else math.inf

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "uniform":
            return rng.uniform(-self.a, self.a, size)
        return rng.normal(0.0, self.sigma, size)


@dataclass(frozen=True)
class ProcessSpec:
    """``kind`` is one of ``ar``, ``ma``, ``nonlinear_cos_sin``.

    For ``ar`` the recursion is ``X_t = sum_j a_j X_{t-j} + e_t``; for ``ma`` it is
    ``X_t = e_t + sum_j b_j e_{t-j}`` (empty ``coeffs`` gives iid noise).
    """

    kind: str
    coeffs: tuple[float, ...] = ()
    innovation: InnovationSpec = InnovationSpec()
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if self.kind not in ("ar", "ma", "nonlinear_cos_sin"):
            raise ValidationError(f"unknown process kind {self.kind!r}")
        if self.burn_in < 0:
            raise ValidationError("burn_in must be >= 0")
        if self.kind == "ar":
            if not self.coeffs:
                raise ValidationError("AR process needs at least one coefficient")
            if stationarity_check(self.coeffs) != STATIONARY:
                raise ValidationError(f"AR coefficients {self.coeffs} are not stationary")


def stationarity_check(coeffs: Sequence[float], tol: float = 1e-9) -> str:
    """Classify ``1 - sum_j a_j z^j`` by whether all its roots lie outside the unit disk.

    Uses the companion-matrix eigenvalues, which are the reciprocals of the
    polynomial roots; stationary iff every eigenvalue has modulus < 1 - tol.
    """
    a = np.asarray(coeffs, dtype=float)
    if a.size == 0:
        raise ValidationError("coeffs must be nonempty")
    nz = np.flatnonzero(a)
    if nz.size == 0:
        return STATIONARY
    a = a[: nz[-1] + 1]
    p = a.size
    companion = np.zeros((p, p))
    companion[0, :] = a
    companion[1:, :-1] = np.eye(p - 1)
    moduli = np.abs(np.linalg.eigvals(companion))
    return STATIONARY if np.all(moduli < 1.0 - tol) else NON_STATIONARY


def _trajectory(spec: ProcessSpec, eps: np.ndarray) -> np.ndarray:
    if spec.kind == "ar":
        return lfilter([1.0], np.concatenate(([1.0], -np.asarray(spec.coeffs))), eps)
    if spec.kind == "ma":
        return lfilter(np.concatenate(([1.0], spec.coeffs)), [1.0], eps)
    x = np.zeros(eps.size)
    x1 = x2 = 0.0
    cos, sin = math.cos, math.sin
    for t, e in enumerate(eps.tolist()):
        xt = cos(x1) * sin(x2) + e
        x[t] = xt
        x1, x2 = xt, x1
    return x


def simulate(spec: ProcessSpec, length: int, seed: int) -> TimeSeries:
    """Last ``length`` values of a zero-started trajectory of ``burn_in + length`` steps."""
    if length < 1:
        raise ValidationError("length must be >= 1")
    rng = np.random.default_rng(seed)
    eps = spec.innovation.draw(rng, spec.burn_in + length)
    return TimeSeries(_trajectory(spec, eps)[spec.burn_in:])


def iterate_ar(coeffs: Sequence[float], init: Sequence[float], length: int) -> TimeSeries:
    """Noiseless AR recursion started from ``init`` (oldest value first).

    The returned series starts with ``init`` and has ``length`` values in total.
    """
    a = list(map(float, coeffs))
    x = list(map(float, init))
    if len(x) < len(a):
        raise ValidationError("init must provide at least len(coeffs) values")
    while len(x) < length:
        x.append(sum(aj * x[-j] for j, aj in enumerate(a, start=1)))
    return TimeSeries(np.asarray(x[:length]))


def substream_seed(master_seed: int, *key: int) -> int:
    """Deterministic 63-bit seed for the substream identified by ``key``."""
    ss = np.random.SeedSequence([int(master_seed), *map(int, key)])
    return int(ss.generate_state(1, dtype=np.uint64)[0]) >> 1


# the three simulation models; innovations supplied separately
STUDY_MODELS = {
    "align1": ("ar", (0.5, 0.1)),
    "align2": ("ar", (0.0, 0.0, 0.0, 0.6, 0.0, 0.0, 0.0, 0.1)),
    "align3": ("nonlinear_cos_sin", ()),
}


def model_spec(name: str, innovation: InnovationSpec, burn_in: int = DEFAULT_BURN_IN) -> ProcessSpec:
    try:
        kind, coeffs = STUDY_MODELS[name]
    except KeyError:
        raise ValidationError(f"unknown model {name!r}; expected one of {sorted(STUDY_MODELS)}") from None
    return ProcessSpec(kind, coeffs, innovation, burn_in)
