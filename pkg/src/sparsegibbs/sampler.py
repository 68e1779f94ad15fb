"""Reversible-jump sampler for the Gibbs posterior and its posterior mean.

The target density (counting measure over supports times Lebesgue on each
coordinate subspace) is ``exp(-lam * r(theta)) * prior(theta)`` up to a
constant. Since ``r`` is a quadratic in ``theta``, the sampler works with the
sufficient statistics ``G = Phi'Phi/m``, ``c = Phi'y/m``, ``s = y'y/m`` and
evaluates each single-coordinate change in O(1) after an O(p) bookkeeping
update on acceptance.

Moves
-----
birth   pick ``j`` uniformly off the support, add ``u ~ U(-h, h)`` at ``j``.
death   pick ``j`` uniformly on the support and set it to zero; the reverse
        birth must be able to propose ``theta_j``, so deaths with
        ``|theta_j| >= h`` are rejected.
update  Gaussian random walk on one uniformly chosen support coordinate.

Move probabilities are the configured ``(birth, death, update)`` triple
renormalised over the moves available at the current support size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from .basis import PredictorBasis
from .core import SparseParam, TimeSeries, ValidationError, empirical_risk, lag_windows
from .prior import PriorSpec, log_density_table, log_size_weights

MOVES = ("birth", "death", "update")

DEFAULT_B = 10.0
DEFAULT_N_ITER = 20000
DEFAULT_N_BURN = 10000
DEFAULT_BIRTH_HALF_WIDTH = 0.5


@dataclass(frozen=True)
class SamplerConfig:
    """Sampler settings; ``update_step=None`` means ``0.1 * (b + 1) / sqrt(p)``.

    ``birth_proposal_scale`` is the half-width ``h`` of the uniform birth
    proposal. ``lam = 0`` is accepted and makes the prior the invariant law.
    """

    lam: float
    b: float = DEFAULT_B
    n_iter: int = DEFAULT_N_ITER
    n_burn: int = DEFAULT_N_BURN
    move_probs: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    update_step: Optional[float] = None
    birth_proposal_scale: float = DEFAULT_BIRTH_HALF_WIDTH
    seed: int = 0
    thin: int = 1
    k_max: Optional[int] = None

    def __post_init__(self):
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ValidationError(f"lambda must be finite and >= 0, got {self.lam}")
        if not self.b > 0:
            raise ValidationError("b must be > 0")
        if not 0 <= self.n_burn < self.n_iter:
            raise ValidationError("need 0 <= n_burn < n_iter")
        probs = tuple(float(x) for x in self.move_probs)
        if len(probs) != 3 or min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-9:
            raise ValidationError("move_probs must be three nonnegative numbers summing to 1")
        object.__setattr__(self, "move_probs", probs)
        if self.update_step is not None and not self.update_step > 0:
            raise ValidationError("update_step must be > 0")
        if not self.birth_proposal_scale > 0:
            raise ValidationError("birth_proposal_scale must be > 0")
        if self.thin < 1:
            raise ValidationError("thin must be >= 1")

    def step_for(self, p: int) -> float:
        if self.update_step is not None:
            return self.update_step
        return 0.1 * (self.b + 1.0) / math.sqrt(p)


@dataclass
class Chain:
    """Stored (thinned) trajectory. ``draws`` is dense, one row per stored state."""

    p: int
    iterations: np.ndarray
    draws: np.ndarray
    log_scores: np.ndarray
    accept_counts: dict[str, tuple[int, int]] = field(default_factory=dict)

    def __len__(self):
        return self.draws.shape[0]

    @property
    def states(self) -> list[SparseParam]:
        return [SparseParam.from_dense(row) for row in self.draws]

    def acceptance_rates(self) -> dict[str, float]:
        return {m: (a / n if n else 0.0) for m, (a, n) in self.accept_counts.items()}

    def support_sizes(self) -> np.ndarray:
        return np.count_nonzero(self.draws, axis=1)


class QuadraticRisk:
    """``r(theta) = s - 2 c'theta + theta'G theta`` for a fixed sample and basis."""

    def __init__(self, series: TimeSeries, basis: PredictorBasis):
        y, windows = lag_windows(series.values, basis.q)
        phi = basis.design(windows)
        m = y.size
        self.m = m
        self.gram = phi.T @ phi / m
        self.cross = phi.T @ y / m
        self.sq = float(y @ y / m)

    def __call__(self, theta: np.ndarray) -> float:
        theta = np.asarray(theta, dtype=float)
        return float(self.sq - 2.0 * self.cross @ theta + theta @ self.gram @ theta)

    def many(self, thetas: np.ndarray) -> np.ndarray:
        """Risk at each row of ``thetas`` (shape ``(..., p)``)."""
        t = np.asarray(thetas, dtype=float)
        return self.sq - 2.0 * t @ self.cross + np.einsum("...i,ij,...j->...", t, self.gram, t)


def heuristic_lambda(series: TimeSeries) -> float:
    """``n / var_emp``, the data-driven inverse temperature."""
    if not series.var_emp > 0:
        raise ValidationError("heuristic lambda needs a series with positive empirical variance")
    return series.n / series.var_emp


def _move_table(move_probs, k_eff: int) -> np.ndarray:
    """Row ``k`` holds the (birth, death, update) probabilities at support size ``k``."""
    table = np.zeros((k_eff + 1, 3))
    for k in range(k_eff + 1):
        allowed = np.array([k < k_eff, k > 0, k > 0], dtype=float)
        w = np.asarray(move_probs) * allowed
        if w.sum() == 0:
            # configured probabilities exclude every available move; fall back to uniform
            w = allowed
        table[k] = w / w.sum()
    return table


class GibbsTarget:
    """Log-density of the Gibbs posterior and the birth/death acceptance ratios."""

    def __init__(self, series: TimeSeries, basis: PredictorBasis, config: SamplerConfig):
        if series.n <= basis.q:
            raise ValidationError(f"series of length {series.n} is too short for q={basis.q}")
        self.p = basis.p
        self.risk = QuadraticRisk(series, basis)
        k_max = config.k_max if config.k_max is not None else series.n
        self.prior = PriorSpec(basis.p, config.b, max(1, min(k_max, basis.p)))
        self.k_eff = self.prior.k_eff
        self.lam = config.lam
        self.half_width = config.birth_proposal_scale
        self.log_prior = log_density_table(self.prior)
        self.moves = _move_table(config.move_probs, self.k_eff)
        with np.errstate(divide="ignore"):
            log_moves = np.log(self.moves)
        p, h = self.p, self.half_width
        # constant parts (prior ratio x proposal ratio) of log acceptance for k -> k+1 and k -> k-1
        self.birth_const = np.full(self.k_eff + 1, -np.inf)
        self.death_const = np.full(self.k_eff + 1, -np.inf)
        for k in range(self.k_eff):
            self.birth_const[k] = (self.log_prior[k + 1] - self.log_prior[k]
                                   + log_moves[k + 1, 1] - math.log(k + 1)
                                   - log_moves[k, 0] + math.log(p - k) + math.log(2.0 * h))
        for k in range(1, self.k_eff + 1):
            self.death_const[k] = -self.birth_const[k - 1]

    def log_density(self, theta: np.ndarray) -> float:
        theta = np.asarray(theta, dtype=float)
        k = int(np.count_nonzero(theta))
        if k > self.k_eff or np.abs(theta).sum() >= self.prior.radius:
            return -math.inf
        return -self.lam * self.risk(theta) + self.log_prior[k]

    def log_birth_kernel(self, theta: np.ndarray, j: int, u: float) -> float:
        """Log density of proposing ``theta + u e_j`` by a birth from ``theta``."""
        k = int(np.count_nonzero(theta))
        if theta[j] != 0 or k >= self.k_eff or abs(u) >= self.half_width:
            return -math.inf
        return math.log(self.moves[k, 0]) - math.log(self.p - k) - math.log(2.0 * self.half_width)

    def log_death_kernel(self, theta: np.ndarray, j: int) -> float:
        """Log probability of proposing the removal of coordinate ``j``."""
        k = int(np.count_nonzero(theta))
        if theta[j] == 0:
            return -math.inf
        return math.log(self.moves[k, 1]) - math.log(k)

    def log_accept_birth(self, theta: np.ndarray, j: int, u: float) -> float:
        new = theta.copy()
        new[j] += u
        k = int(np.count_nonzero(theta))
        if np.abs(new).sum() >= self.prior.radius:
            return -math.inf
        dr = self.risk(new) - self.risk(theta)
        return min(0.0, -self.lam * dr + self.birth_const[k])

    def log_accept_death(self, theta: np.ndarray, j: int) -> float:
        if abs(theta[j]) >= self.half_width:
            return -math.inf
        new = theta.copy()
        new[j] = 0.0
        k = int(np.count_nonzero(theta))
        dr = self.risk(new) - self.risk(theta)
        return min(0.0, -self.lam * dr + self.death_const[k])


def birth_death_flux(target: GibbsTarget, theta: np.ndarray, j: int, u: float) -> tuple[float, float]:
    """Log of density x kernel for ``theta -> theta + u e_j`` (birth) and its reverse (death).

    Detailed balance for the pair holds iff the two values coincide.
    """
    theta = np.asarray(theta, dtype=float)
    new = theta.copy()
    new[j] += u
    forward = (target.log_density(theta) + target.log_birth_kernel(theta, j, u)
               + target.log_accept_birth(theta, j, u))
    backward = (target.log_density(new) + target.log_death_kernel(new, j)
                + target.log_accept_death(new, j))
    return forward, backward


def run_rjmcmc(series: TimeSeries, basis: PredictorBasis, config: SamplerConfig) -> Chain:
    target = GibbsTarget(series, basis, config)
    p, k_eff, lam = target.p, target.k_eff, config.lam
    radius = target.prior.radius
    h = target.half_width
    step = config.step_for(p)
    gram = target.risk.gram
    gdiag = np.diag(gram).tolist()
    cross = target.risk.cross.tolist()
    log_prior = target.log_prior
    birth_cut = target.moves[:, 0].tolist()
    death_cut = (target.moves[:, 0] + target.moves[:, 1]).tolist()
    birth_const = target.birth_const.tolist()
    death_const = target.death_const.tolist()

    rng = np.random.default_rng(config.seed)
    n_iter = config.n_iter
    uniforms = rng.random((n_iter, 3))
    normals = rng.standard_normal(n_iter)
    log_acc = np.log(rng.random(n_iter))

    theta = np.zeros(p)
    g_theta = np.zeros(p)  # gram @ theta
    support: list[int] = []
    off_support = list(range(p))
    l1 = 0.0
    r = target.risk.sq

    n_store = (n_iter + config.thin - 1) // config.thin
    draws = np.empty((n_store, p))
    scores = np.empty(n_store)
    iterations = np.arange(0, n_iter, config.thin)
    proposed = [0, 0, 0]
    accepted = [0, 0, 0]
    log = math.log

    for t in range(n_iter):
        k = len(support)
        um, ui, uv = uniforms[t]
        j = -1
        if um < birth_cut[k]:
            move = 0
            j = off_support[int(ui * (p - k))]
            delta = (2.0 * uv - 1.0) * h
            if l1 + abs(delta) < radius:
                dr = delta * (2.0 * (g_theta[j] - cross[j]) + gdiag[j] * delta)
                if log_acc[t] >= -lam * dr + birth_const[k]:
                    j = -1
            else:
                j = -1
        elif um < death_cut[k]:
            move = 1
            j = support[int(ui * k)]
            delta = -theta[j]
            if abs(delta) < h:
                dr = delta * (2.0 * (g_theta[j] - cross[j]) + gdiag[j] * delta)
                if log_acc[t] >= -lam * dr + death_const[k]:
                    j = -1
            else:
                j = -1
        else:
            move = 2
            j = support[int(ui * k)]
            delta = step * normals[t]
            new = theta[j] + delta
            if new != 0.0 and l1 - abs(theta[j]) + abs(new) < radius:
                dr = delta * (2.0 * (g_theta[j] - cross[j]) + gdiag[j] * delta)
                if log_acc[t] >= -lam * dr:
                    j = -1
            else:
                j = -1
        proposed[move] += 1
        if j >= 0:
            accepted[move] += 1
            theta[j] += delta
            g_theta += delta * gram[:, j]
            r += dr
            if move == 0:
                off_support.remove(j)
                support.append(j)
            elif move == 1:
                theta[j] = 0.0
                support.remove(j)
                off_support.append(j)
                off_support.sort()
            l1 = float(np.abs(theta).sum())
        if t % config.thin == 0:
            i = t // config.thin
            draws[i] = theta
            scores[i] = -lam * r + log_prior[len(support)]

    counts = {m: (accepted[i], proposed[i]) for i, m in enumerate(MOVES)}
    return Chain(p, iterations, draws, scores, counts)


def posterior_mean(chain: Chain, n_burn: int) -> SparseParam:
    """Average of the stored states from iteration ``n_burn`` on (zeros off support)."""
    keep = chain.iterations >= n_burn
    if not keep.any():
        raise ValidationError("no stored states after burn-in")
    return SparseParam.from_dense(chain.draws[keep].mean(axis=0))


@dataclass(frozen=True)
class GridPosterior:
    mean: SparseParam
    size_probs: np.ndarray


def _trap_1d(values: np.ndarray, step: float) -> np.ndarray:
    return trapezoid(values, dx=step, axis=-1)


def grid_posterior(series: TimeSeries, basis: PredictorBasis, lam: float, b: float,
                   grid_step: float, k_max: Optional[int] = None) -> GridPosterior:
    """Gibbs posterior mean and support-size law by deterministic quadrature (p <= 2).

    Each coordinate line uses the trapezoid rule on ``[-R, R]``. The 2-d ball
    ``|t1| + |t2| < R`` is integrated in the rotated coordinates
    ``u = t1 + t2``, ``v = t1 - t2`` where it becomes the square ``[-R, R]^2``
    (Jacobian 1/2), so the grid follows the ball boundary exactly.
    """
    if basis.p > 2:
        raise ValidationError("grid quadrature oracle supports p <= 2 only")
    risk = QuadraticRisk(series, basis)
    p = basis.p
    prior = PriorSpec(p, b, max(1, min(k_max if k_max is not None else series.n, p)))
    log_prior = log_density_table(prior)
    R = prior.radius
    n_int = max(2, int(math.ceil(2 * R / grid_step)))
    grid = np.linspace(-R, R, n_int + 1)
    dx = grid[1] - grid[0]

    # each piece: (log prior density, points (..., p), integration routine)
    pieces = []
    pieces.append((0, log_prior[0], np.zeros((1, p)), lambda f: f[0]))
    for j in range(p):
        pts = np.zeros((grid.size, p))
        pts[:, j] = grid
        pieces.append((1, log_prior[1], pts, lambda f: _trap_1d(f, dx)))
    if p == 2 and prior.k_eff >= 2:
        uu, vv = np.meshgrid(grid, grid, indexing="ij")
        pts = np.stack([(uu + vv) / 2, (uu - vv) / 2], axis=-1)
        pieces.append((2, log_prior[2], pts, lambda f: 0.5 * _trap_1d(_trap_1d(f, dx), dx)))

    exponents = [lp - lam * risk.many(pts) for _, lp, pts, _ in pieces]
    shift = max(float(np.max(e)) for e in exponents)
    mass = np.zeros(prior.k_eff + 1)
    first = np.zeros(p)
    for (k, _, pts, integrate), e in zip(pieces, exponents):
        w = np.exp(e - shift)
        mass[k] += integrate(w)
        for i in range(p):
            first[i] += integrate(w * pts[..., i])
    total = mass.sum()
    return GridPosterior(SparseParam.from_dense(first / total), mass / total)


def grid_posterior_mean(series: TimeSeries, basis: PredictorBasis, lam: float, b: float,
                        grid_step: float) -> SparseParam:
    return grid_posterior(series, basis, lam, b, grid_step).mean


@dataclass(frozen=True)
class GibbsDiagnostics:
    lam: float
    b: float
    n_iter: int
    n_burn: int
    seed: int
    acceptance: dict[str, float]
    mean_support_size: float
    train_risk: float


def fit_gibbs(series: TimeSeries, basis: PredictorBasis, b: float = DEFAULT_B,
              lambda_opt: Optional[float] = None, config: Optional[SamplerConfig] = None,
              seed: Optional[int] = None) -> tuple[SparseParam, GibbsDiagnostics]:
    """Heuristic-temperature Gibbs fit: sample, average, report diagnostics.

    ``config`` supplies sampler overrides; its ``lam`` and ``b`` are replaced by
    ``lambda_opt`` (or the heuristic) and ``b``.
    """
    lam = heuristic_lambda(series) if lambda_opt is None else float(lambda_opt)
    if config is None:
        config = SamplerConfig(lam=lam, b=b)
    else:
        config = replace(config, lam=lam, b=b)
    if seed is not None:
        config = replace(config, seed=seed)
    chain = run_rjmcmc(series, basis, config)
    theta = posterior_mean(chain, config.n_burn)
    keep = chain.iterations >= config.n_burn
    diag = GibbsDiagnostics(
        lam=lam,
        b=b,
        n_iter=config.n_iter,
        n_burn=config.n_burn,
        seed=config.seed,
        acceptance=chain.acceptance_rates(),
        mean_support_size=float(chain.support_sizes()[keep].mean()),
        train_risk=empirical_risk(series, basis, theta, basis.q).empirical_risk,
    )
    return theta, diag


def prior_size_probs(p: int, k_max: int) -> np.ndarray:
    """Prior law of the support size, for comparison with chain frequencies."""
    return np.exp(log_size_weights(p, k_max))
