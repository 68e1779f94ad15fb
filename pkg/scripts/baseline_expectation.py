"""Many-replication means of the AIC and full AR(q) baselines at small n.

Separates estimator choice (conditional OLS vs Yule-Walker) from Monte Carlo
noise when comparing the 20-replication summary against reference values.
"""
import argparse
import statistics

from sparsegibbs.baselines import aic_select, aic_select_yw, ar_holdout_risk, ols_ar_fit, yule_walker_path
from sparsegibbs.config import INNOVATION_KINDS, ExperimentConfig
from sparsegibbs.reference import REFERENCE_TABLE
from sparsegibbs.simulate import STUDY_MODELS, model_spec, simulate, substream_seed


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--reps", type=int, default=400)
    ap.add_argument("--q", type=int, default=20)
    args = ap.parse_args()
    cfg = ExperimentConfig()
    q = args.q
    for mi, model in enumerate(STUDY_MODELS):
        for ii, innov in enumerate(INNOVATION_KINDS):
            spec = model_spec(model, cfg.innovation(innov))
            out = {k: [] for k in ("ols_aic", "ols_full", "yw_aic", "yw_full")}
            for rep in range(args.reps):
                train, test = simulate(spec, 2 * args.n, substream_seed(999, mi, ii, args.n, rep)).split(args.n)
                out["ols_aic"].append(ar_holdout_risk(aic_select(train, q, q), test, q).empirical_risk)
                out["ols_full"].append(ar_holdout_risk(ols_ar_fit(train, q, q), test, q).empirical_risk)
                out["yw_aic"].append(ar_holdout_risk(aic_select_yw(train, q), test, q).empirical_risk)
                out["yw_full"].append(ar_holdout_risk(yule_walker_path(train, q)[q], test, q).empirical_risk)
            ref = REFERENCE_TABLE.get((model, innov, args.n))
            refs = f"  ref aic={ref['aic'][0]:.3f} full={ref['full'][0]:.3f}" if ref else ""
            means = "  ".join(f"{k}={statistics.fmean(v):.4f}" for k, v in out.items())
            print(f"{model} {innov:8} {means}{refs}")


if __name__ == "__main__":
    main()
