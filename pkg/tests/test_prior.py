import itertools
import math

import numpy as np
import pytest
from scipy import integrate, stats

from sparsegibbs.core import SparseParam, ValidationError
from sparsegibbs.prior import (PriorSpec, l1_ball_log_volume, log_prior_density, log_size_weights,
                               model_log_weight, sample_l1_ball, sample_prior)


def brute_force_subset_weights(p, k_max):
    """Direct summation of 2^{-k-1} / C(p, k) over every subset, then normalisation."""
    raw = {}
    for k in range(min(p, k_max) + 1):
        for subset in itertools.combinations(range(p), k):
            raw[subset] = 2.0 ** (-k - 1) / math.comb(p, k)
    z = sum(raw.values())
    return {s: w / z for s, w in raw.items()}


def test_model_weight_examples():
    assert math.exp(model_log_weight(0, 2, 1)) == pytest.approx(2 / 3, rel=1e-14)
    assert math.exp(model_log_weight(1, 1, 1)) == pytest.approx(1 / 3, rel=1e-14)


@pytest.mark.parametrize("p,k_max", [(1, 1), (2, 1), (2, 2), (4, 3), (6, 6), (5, 100)])
def test_model_weights_match_enumeration(p, k_max):
    oracle = brute_force_subset_weights(p, k_max)
    total = 0.0
    for subset, w in oracle.items():
        mine = math.exp(model_log_weight(len(subset), p, k_max))
        assert mine == pytest.approx(w, rel=1e-12)
        total += mine
    assert abs(total - 1.0) < 1e-12


def test_model_weight_out_of_range():
    with pytest.raises(ValidationError):
        model_log_weight(3, 2, 5)


@pytest.mark.parametrize("k,R,expected", [(1, 1.0, math.log(2)), (2, 1.0, math.log(2)), (3, 2.0, math.log(32 / 3))])
def test_l1_volume_examples(k, R, expected):
    assert l1_ball_log_volume(k, R) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("k,R", [(1, 1.5), (2, 1.0), (3, 2.0)])
def test_l1_volume_hit_or_miss(k, R):
    rng = np.random.default_rng(k)
    pts = rng.uniform(-R, R, size=(1_000_000, k))
    frac = np.mean(np.abs(pts).sum(axis=1) < R)
    assert math.exp(l1_ball_log_volume(k, R)) == pytest.approx(frac * (2 * R) ** k, rel=0.01)


def test_log_prior_density_examples():
    spec = PriorSpec(p=1, b=1.0, k_max=1)
    assert log_prior_density(SparseParam.zeros(1), spec) == model_log_weight(0, 1, 1)
    assert log_prior_density(SparseParam.from_dense([0.5]), spec) == pytest.approx(math.log(1 / 3) - math.log(4))
    assert log_prior_density(SparseParam.from_dense([2.0]), spec) == -math.inf
    assert log_prior_density(SparseParam.from_dense([-2.5]), spec) == -math.inf


def prior_total_mass(spec):
    """Atom plus quadrature of exp(log density) over each coordinate subspace."""
    dens = lambda *t: math.exp(log_prior_density(SparseParam.from_dense(list(t)), spec))
    R = spec.radius
    total = math.exp(log_prior_density(SparseParam.zeros(spec.p), spec))
    if spec.p == 1:
        total += integrate.quad(lambda x: dens(x), -R, R, points=[0.0], epsabs=1e-12)[0]
        return total
    total += integrate.quad(lambda x: dens(x, 0.0), -R, R, points=[0.0], epsabs=1e-12)[0]
    total += integrate.quad(lambda y: dens(0.0, y), -R, R, points=[0.0], epsabs=1e-12)[0]
    if spec.k_eff >= 2:
        # interior only: the axes are the 1-d pieces, measure zero here
        inner = lambda y, x: math.exp(model_log_weight(2, 2, spec.k_max) - l1_ball_log_volume(2, R))
        total += integrate.dblquad(inner, -R, R, lambda x: -(R - abs(x)), lambda x: R - abs(x),
                                   epsabs=1e-12)[0]
    return total


@pytest.mark.parametrize("p,k_max,b", [(1, 1, 1.0), (2, 1, 0.5), (2, 2, 1.0), (2, 2, 3.0)])
def test_prior_integrates_to_one(p, k_max, b):
    assert abs(prior_total_mass(PriorSpec(p, b, k_max)) - 1.0) < 1e-6


def test_sample_prior_size_frequency():
    spec = PriorSpec(p=3, b=1.0, k_max=3)
    rng = np.random.default_rng(0)
    n = 100_000
    sizes = np.array([sample_prior(spec, rng).size for _ in range(n)])
    probs = np.exp(log_size_weights(3, 3))
    for k in range(4):
        freq = np.mean(sizes == k)
        sd = math.sqrt(probs[k] * (1 - probs[k]) / n)
        assert abs(freq - probs[k]) < 3 * sd


def test_sample_prior_inside_ball():
    spec = PriorSpec(p=6, b=0.5, k_max=6)
    rng = np.random.default_rng(1)
    for _ in range(5000):
        assert sample_prior(spec, rng).l1 < spec.radius


def test_one_dimensional_draws_uniform():
    spec = PriorSpec(p=1, b=1.0, k_max=1)
    rng = np.random.default_rng(2)
    draws = [t.coeffs[0] for t in (sample_prior(spec, rng) for _ in range(40_000)) if t.size == 1][:10_000]
    assert len(draws) == 10_000
    res = stats.kstest(draws, stats.uniform(loc=-2.0, scale=4.0).cdf)
    assert res.statistic < 1.63 / math.sqrt(len(draws))


def test_l1_ball_sampler_radius_law():
    # |x|_1 / R has density k u^{k-1}, i.e. (|x|_1/R)^k is uniform
    rng = np.random.default_rng(3)
    k, R = 3, 2.0
    u = np.array([np.abs(sample_l1_ball(rng, k, R)).sum() / R for _ in range(10_000)]) ** k
    assert stats.kstest(u, "uniform").pvalue > 0.01


def test_sampler_and_density_consistent():
    """E[theta_1^2] under the sampler vs quadrature of the density (p = 2)."""
    spec = PriorSpec(p=2, b=1.0, k_max=2)
    R = spec.radius
    w1 = math.exp(model_log_weight(1, 2, 2) - l1_ball_log_volume(1, R))
    w2 = math.exp(model_log_weight(2, 2, 2) - l1_ball_log_volume(2, R))
    line = integrate.quad(lambda x: x * x * w1, -R, R)[0]
    square = integrate.dblquad(lambda y, x: x * x * w2, -R, R, lambda x: -(R - abs(x)), lambda x: R - abs(x))[0]
    expected = line + square
    rng = np.random.default_rng(4)
    vals = np.array([sample_prior(spec, rng)[0] ** 2 for _ in range(100_000)])
    assert abs(vals.mean() - expected) < 3 * vals.std() / math.sqrt(vals.size)
