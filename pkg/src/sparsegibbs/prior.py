"""Sparsity prior: geometric weights on the support size, uniform on an l1 ball.

A draw picks ``k`` with probability proportional to ``2**-(k+1)`` for
``k = 0..k_max``, a support ``I`` uniformly among the ``C(p, k)`` subsets of
that size, and coefficients uniformly on the k-dimensional l1 ball of radius
``b + 1``. Densities are taken with respect to counting measure over supports
times Lebesgue measure on each coordinate subspace; the empty support is a
point mass at zero with "volume" 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SparseParam, ValidationError


@dataclass(frozen=True)
class PriorSpec:
    p: int
    b: float
    k_max: int

    def __post_init__(self):
        if self.p < 1:
            raise ValidationError("p must be >= 1")
        if not self.b > 0:
            raise ValidationError(f"b must be > 0, got {self.b}")
        if self.k_max < 1:
            raise ValidationError("k_max must be >= 1")

    @property
    def radius(self) -> float:
        return self.b + 1.0

    @property
    def k_eff(self) -> int:
        # supports larger than p are empty
        return min(self.p, self.k_max)

    @classmethod
    def for_sample(cls, p: int, b: float, n: int) -> "PriorSpec":
        return cls(p, b, min(n, p))


def _log_normalizer(k_eff: int) -> float:
    # sum_{k=0}^{K} 2^{-k-1} = 1 - 2^{-(K+1)}
    return math.log1p(-(2.0 ** -(k_eff + 1)))


def log_size_weights(p: int, k_max: int) -> np.ndarray:
    """Log-probability of each support size ``k = 0..min(p, k_max)``."""
    k_eff = min(p, k_max)
    k = np.arange(k_eff + 1)
    return -(k + 1) * math.log(2.0) - _log_normalizer(k_eff)


def model_log_weight(k: int, p: int, k_max: int) -> float:
    """Log prior mass of one specific support of size ``k``."""
    k_eff = min(p, k_max)
    if not 0 <= k <= k_eff:
        raise ValidationError(f"support size {k} outside 0..{k_eff}")
    log_binom = math.lgamma(p + 1) - math.lgamma(k + 1) - math.lgamma(p - k + 1)
    return -(k + 1) * math.log(2.0) - log_binom - _log_normalizer(k_eff)


def l1_ball_log_volume(k: int, radius: float) -> float:
    """``log((2R)^k / k!)``; k = 0 gives 0 (point mass convention)."""
    if k < 0 or not radius > 0:
        raise ValidationError("need k >= 0 and radius > 0")
    return k * math.log(2.0 * radius) - math.lgamma(k + 1)


def log_prior_density(theta: SparseParam, spec: PriorSpec) -> float:
    if theta.p != spec.p:
        raise ValidationError(f"theta has dimension {theta.p}, prior has {spec.p}")
    k = theta.size
    if k > spec.k_eff or theta.l1 >= spec.radius:
        return -math.inf
    return model_log_weight(k, spec.p, spec.k_max) - l1_ball_log_volume(k, spec.radius)


def log_density_table(spec: PriorSpec) -> np.ndarray:
    """``log_prior_density`` as a function of the support size only (inside the ball)."""
    return np.array([
        model_log_weight(k, spec.p, spec.k_max) - l1_ball_log_volume(k, spec.radius)
        for k in range(spec.k_eff + 1)
    ])


def sample_l1_ball(rng: np.random.Generator, k: int, radius: float) -> np.ndarray:
    """Uniform point in ``{x in R^k : |x|_1 < radius}``."""
    if k == 0:
        return np.zeros(0)
    direction = rng.dirichlet(np.ones(k))
    # the l1 norm of a uniform point has density k u^{k-1} on (0, 1) after scaling
    scale = radius * rng.random() ** (1.0 / k)
    signs = rng.choice((-1.0, 1.0), size=k)
    return signs * direction * scale


def sample_prior(spec: PriorSpec, seed: int | np.random.Generator) -> SparseParam:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    probs = np.exp(log_size_weights(spec.p, spec.k_max))
    k = int(rng.choice(probs.size, p=probs / probs.sum()))
    support = rng.choice(spec.p, size=k, replace=False)
    coeffs = sample_l1_ball(rng, k, spec.radius)
    return SparseParam(spec.p, tuple(support.tolist()), tuple(coeffs.tolist()))
