"""Computable pieces of the oracle inequality and its supporting lemmas.

Includes the mixing aggregate ``K_phi^(n)(q)``, the prescribed inverse
temperature and remainder of the oracle inequality, its sparse
specialisation, the Kullback divergence and variational formula on finite
spaces, and a Monte Carlo check of the Bernstein-type log-MGF bound for
uniformly mixing sequences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.signal import lfilter
from scipy.special import logsumexp

from .core import ValidationError
from .simulate import ProcessSpec


class BoundError(ValidationError):
    """An admissibility condition of the oracle inequality is violated."""


@dataclass(frozen=True)
class MixingProfile:
    """phi_r for r >= 1, with ``phi0`` used at r = 0.

    explicit      ``values = (phi_1, phi_2, ...)``, zero past the end
    geometric     ``values = (c, rho)``, ``phi_r = min(1, c * rho**r)``
    m_dependent   ``values = (m,)``, ``phi_r = 1`` for ``r <= m`` (capped) and 0 beyond
    """

    kind: str
    values: tuple[float, ...]
    phi0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not 0 <= self.phi0 <= 1:
            raise ValidationError("phi0 must lie in [0, 1]")
        if self.kind == "explicit":
            v = np.asarray(self.values)
            if v.size and (v.min() < 0 or v.max() > 1):
                raise ValidationError("explicit phi values must lie in [0, 1]")
            if np.any(np.diff(np.concatenate(([self.phi0], v))) > 0):
                raise ValidationError("explicit phi profile must be non-increasing")
        elif self.kind == "geometric":
            if len(self.values) != 2:
                raise ValidationError("geometric profile needs (c, rho)")
            c, rho = self.values
            if c < 0 or not 0 <= rho < 1:
                raise ValidationError("geometric profile needs c >= 0 and 0 <= rho < 1")
        elif self.kind == "m_dependent":
            if len(self.values) != 1 or self.values[0] < 0 or self.values[0] != int(self.values[0]):
                raise ValidationError("m_dependent profile needs a single integer m >= 0")
        else:
            raise ValidationError(f"unknown mixing profile kind {self.kind!r}")

    @classmethod
    def iid(cls) -> "MixingProfile":
        return cls("explicit", ())

    def phi(self, r: int) -> float:
        if r < 0:
            raise ValueError("r must be >= 0")
        if r == 0:
            return self.phi0
        if self.kind == "explicit":
            return self.values[r - 1] if r <= len(self.values) else 0.0
        if self.kind == "geometric":
            c, rho = self.values
            return min(1.0, c * rho ** r)
        return 1.0 if r <= self.values[0] else 0.0


def k_phi(profile: MixingProfile, n: int, q: int) -> float:
    """``1 + sum_{r=1}^{n-q} sqrt(phi_{floor(r/q)})``."""
    if not n > q >= 1:
        raise ValidationError("need n > q >= 1")
    total = 1.0
    for r in range(1, n - q + 1):
        total += math.sqrt(profile.phi(r // q))
    return total


def k_phi_sup(profile: MixingProfile, q: int) -> float:
    """Limit of ``k_phi(profile, n, q)`` as n grows: a valid Phi(q) for every n.

    Index ``j = floor(r/q)`` is hit ``q - 1`` times for j = 0 and ``q`` times
    for each j >= 1.
    """
    if q < 1:
        raise ValidationError("q must be >= 1")
    total = 1.0 + (q - 1) * math.sqrt(profile.phi0)
    if profile.kind == "explicit":
        return total + q * sum(math.sqrt(v) for v in profile.values)
    if profile.kind == "m_dependent":
        return total + q * int(profile.values[0])
    c, rho = profile.values
    if c == 0 or rho == 0:
        return total
    # capped terms (c rho^j >= 1) first, then the geometric tail of sqrt(c) rho^{j/2}
    j = 1
    while c * rho ** j >= 1.0:
        total += q
        j += 1
    sr = math.sqrt(rho)
    return total + q * math.sqrt(c) * sr ** j / (1.0 - sr)


@dataclass(frozen=True)
class BoundInputs:
    n: int
    q: int
    p: int
    b: float
    B: float
    Phi_q: float
    eta: float
    epsilon: float
    support_size: int

    def __post_init__(self):
        self.validate()

    @property
    def support_cap(self) -> float:
        return self.eta * (self.n - self.q) / (32.0 * self.Phi_q * (2.0 + self.b) ** 2)

    def validate(self) -> None:
        if not self.q < self.n:
            raise BoundError(f"need q < n (q={self.q}, n={self.n})")
        if self.q < 1 or self.p < 1:
            raise BoundError("need q >= 1 and p >= 1")
        if not (self.b > 0 and self.B > 0):
            raise BoundError("need b > 0 and B > 0")
        if not self.Phi_q >= 1:
            raise BoundError(f"need Phi(q) >= 1 since K_phi >= 1 (Phi(q)={self.Phi_q})")
        if not 0 < self.eta <= 16.0 / self.Phi_q:
            raise BoundError(
                f"eta constraint 0 < eta <= 16/Phi(q) violated: eta={self.eta}, 16/Phi(q)={16.0 / self.Phi_q}")
        if not 0 < self.epsilon < 1:
            raise BoundError(f"need 0 < epsilon < 1 (epsilon={self.epsilon})")
        if not 0 <= self.support_size <= self.p:
            raise BoundError(f"need 0 <= |I| <= p (|I|={self.support_size}, p={self.p})")
        if not self.support_size < self.support_cap:
            raise BoundError(
                f"support cap |I| < eta(n-q)/(32 Phi(q)(2+b)^2) violated: "
                f"|I|={self.support_size}, cap={self.support_cap}")


def _envelope(inputs: BoundInputs) -> float:
    # 64 Phi(q) (2+b)^2 B^2 / ((n-q) eta)
    return 64.0 * inputs.Phi_q * (2.0 + inputs.b) ** 2 * inputs.B ** 2 / ((inputs.n - inputs.q) * inputs.eta)


def theorem_lambda(inputs: BoundInputs) -> float:
    """``eta (n-q) / (64 Phi(q) (2+b)^2 B^2)``."""
    return inputs.eta * (inputs.n - inputs.q) / (64.0 * inputs.Phi_q * (2.0 + inputs.b) ** 2 * inputs.B ** 2)


def approximation_factor(eta: float) -> float:
    """``(2+eta)/(2-eta)``, the factor on the approximation term; +inf once eta >= 2."""
    return (2.0 + eta) / (2.0 - eta) if eta < 2.0 else math.inf


def oracle_remainder(inputs: BoundInputs) -> float:
    k = inputs.support_size
    bracket = 2.0 * math.log(2.0 / inputs.epsilon)
    if k > 0:
        inner = (inputs.B * inputs.b * inputs.p * math.e / k) * math.sqrt(2.0 * inputs.eta * (inputs.n - inputs.q) / k)
        bracket += k * (inputs.B + 2.0 * math.log(inner))
    return _envelope(inputs) * bracket


def sparse_corollary_bound(n: int, q: int, p: int, b: float, B: float, Phi_q: float,
                           eta: float, epsilon: float, p0: int) -> float:
    """Excess-risk bound when the best predictor has ``p0`` nonzero coordinates."""
    lead = 64.0 * Phi_q * (2.0 + b) ** 2 * B ** 2 / ((n - q) * eta)
    log_term = math.log(B * b * p * math.e / p0 * math.sqrt(2.0 * eta * (n - q) / p0))
    return lead * (p0 * (B + 2.0 * log_term) + 2.0 * math.log(2.0 / epsilon))


def corollary_min_n(q: int, b: float, Phi_q: float, eta: float, p0: int) -> float:
    """The sparse bound applies for ``n`` strictly above this value."""
    return q + p0 * 32.0 * Phi_q * (2.0 + b) ** 2 / eta


def kl_divergence(rho: Sequence[float], pi: Sequence[float]) -> float:
    rho = np.asarray(rho, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if rho.shape != pi.shape:
        raise ValidationError("rho and pi must live on the same finite space")
    charged = rho > 0
    if np.any(pi[charged] <= 0):
        return math.inf
    d = float(np.sum(rho[charged] * (np.log(rho[charged]) - np.log(pi[charged]))))
    # nonnegative by Gibbs' inequality; clamp roundoff on near-equal inputs
    return max(d, 0.0)


@dataclass(frozen=True)
class DVResult:
    lhs: float
    rhs: float
    argmax: np.ndarray


def gibbs_measure(pi: Sequence[float], h: Sequence[float]) -> np.ndarray:
    pi = np.asarray(pi, dtype=float)
    h = np.asarray(h, dtype=float)
    out = np.zeros_like(pi)
    pos = pi > 0
    logw = np.log(pi[pos]) + h[pos]
    out[pos] = np.exp(logw - logsumexp(logw))
    return out


def dv_check(pi: Sequence[float], h: Sequence[float]) -> DVResult:
    """Both sides of ``log pi[e^h] = sup_rho (rho[h] - KL(rho, pi))``, the sup taken at the Gibbs measure."""
    pi = np.asarray(pi, dtype=float)
    h = np.asarray(h, dtype=float)
    pos = pi > 0
    lhs = float(logsumexp(h[pos], b=pi[pos]))
    g = gibbs_measure(pi, h)
    rhs = float(g[pos] @ h[pos]) - kl_divergence(g, pi)
    return DVResult(lhs, rhs, g)


@dataclass(frozen=True)
class SamsonReport:
    lambdas: np.ndarray
    log_mgf: np.ndarray
    std_error: np.ndarray
    bound: np.ndarray
    sigma2: float
    n_terms: int
    k_phi: float
    violations: int

    def ratio(self) -> np.ndarray:
        """Estimated log-MGF divided by ``lambda^2 N sigma^2``; tends to 1/2 as lambda -> 0."""
        return self.log_mgf / (self.lambdas ** 2 * self.n_terms * self.sigma2)


def _sample_paths(process: ProcessSpec, n_terms: int, n_mc: int, rng: np.random.Generator) -> np.ndarray:
    """``n_mc`` independent stationary-approximating paths of length ``n_terms``."""
    if process.kind == "ma" and not process.coeffs:
        return process.innovation.draw(rng, (n_mc, n_terms))
    total = process.burn_in + n_terms
    eps = process.innovation.draw(rng, (n_mc, total))
    if process.kind == "ar":
        paths = lfilter([1.0], np.concatenate(([1.0], -np.asarray(process.coeffs))), eps, axis=1)
    elif process.kind == "ma":
        paths = lfilter(np.concatenate(([1.0], process.coeffs)), [1.0], eps, axis=1)
    else:
        paths = np.zeros_like(eps)
        x1 = np.zeros(n_mc)
        x2 = np.zeros(n_mc)
        for t in range(total):
            paths[:, t] = np.cos(x1) * np.sin(x2) + eps[:, t]
            x1, x2 = paths[:, t], x1
    return paths[:, process.burn_in:]


def samson_mc_check(process: ProcessSpec, f: Callable[[np.ndarray], np.ndarray],
                    lambda_grid: Sequence[float], n_mc: int, *, n_terms: int,
                    f_bound: float, k_phi_value: float = 1.0, seed: int = 0,
                    sigma2: Optional[float] = None) -> SamsonReport:
    """Monte Carlo log-MGF of ``S(f) - E S(f)`` against ``8 K N sigma^2(f) lambda^2``.

    ``E S(f)`` is replaced by the replication mean; ``sigma^2(f)`` by the pooled
    sample variance of ``f(Z_i)`` unless given. A grid point counts as a
    violation when the estimate exceeds the bound by more than three
    delta-method standard errors.
    """
    lambdas = np.asarray(lambda_grid, dtype=float)
    lam_max = 1.0 / (f_bound * k_phi_value ** 2) if f_bound > 0 else math.inf
    if np.any(lambdas <= 0) or np.any(lambdas > lam_max * (1 + 1e-12)):
        raise ValidationError(f"lambda grid must lie in (0, {lam_max}]")
    rng = np.random.default_rng(seed)
    fz = np.asarray(f(_sample_paths(process, n_terms, n_mc, rng)), dtype=float)
    if fz.shape != (n_mc, n_terms):
        fz = np.broadcast_to(fz, (n_mc, n_terms))
    if np.max(np.abs(fz)) > f_bound * (1 + 1e-12):
        raise ValidationError("f exceeds its declared bound")
    sums = fz.sum(axis=1)
    centred = sums - sums.mean()
    s2 = float(np.var(fz)) if sigma2 is None else float(sigma2)

    log_mgf = np.empty(lambdas.size)
    se = np.empty(lambdas.size)
    for i, lam in enumerate(lambdas):
        z = lam * centred
        log_mean = float(logsumexp(z) - math.log(n_mc))
        w = np.exp(z - log_mean)  # normalised to mean 1
        log_mgf[i] = log_mean
        se[i] = float(np.std(w, ddof=1) / math.sqrt(n_mc))
    bound = 8.0 * k_phi_value * n_terms * s2 * lambdas ** 2
    violations = int(np.sum(log_mgf - 3.0 * se > bound))
    return SamsonReport(lambdas, log_mgf, se, bound, s2, n_terms, k_phi_value, violations)
