"""Compare the reversible-jump posterior mean with the quadrature oracle on p <= 2 problems."""
import argparse

from sparsegibbs.basis import make_basis
from sparsegibbs.sampler import SamplerConfig, grid_posterior, heuristic_lambda, posterior_mean, run_rjmcmc
from sparsegibbs.simulate import InnovationSpec, model_spec, simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--b", type=float, default=1.0)
    ap.add_argument("--n-iter", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()
    series = simulate(model_spec("align1", InnovationSpec("uniform")), args.n, seed=11)
    lam0 = heuristic_lambda(series)
    for q in (1, 2):
        for scale in (0.05, 1.0, 4.0):
            basis = make_basis("ar_linear", q)
            grid = grid_posterior(series, basis, scale * lam0, args.b, 0.002)
            cfg = SamplerConfig(lam=scale * lam0, b=args.b, n_iter=args.n_iter, n_burn=args.n_iter // 10,
                                seed=args.seed)
            chain = run_rjmcmc(series, basis, cfg)
            mean = posterior_mean(chain, cfg.n_burn).to_dense()
            print(f"p={q} lam={scale:g}*n/var  grid={grid.mean.to_dense().round(5)}  rjmcmc={mean.round(5)}  "
                  f"sizes grid={grid.size_probs.round(3)}  acc={ {k: round(v, 3) for k, v in chain.acceptance_rates().items()} }")


if __name__ == "__main__":
    main()
