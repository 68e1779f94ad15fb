"""Run the simulation study and print each summary cell next to its reference value.

    python scripts/run_table.py --out results --jobs 4
"""
import argparse
import csv

from sparsegibbs.config import ExperimentConfig, load_kv
from sparsegibbs.experiment import run_experiment
from sparsegibbs.reference import REFERENCE_TABLE, TOLERANCE


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--out", default="results")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    kv = load_kv(args.config) if args.config else {}
    kv["experiment.master_seed"] = str(args.seed)
    _, summary_path = run_experiment(ExperimentConfig.from_mapping(kv), args.out, jobs=args.jobs)

    with open(summary_path) as fh:
        rows = list(csv.DictReader(fh))
    hits = 0
    print(f"{'model':7} {'innov':9} {'n':>5} {'method':6} {'ours':>8} {'sd':>7} {'ref':>6} {'diff':>8}")
    for r in rows:
        n = int(r["n"])
        ref = REFERENCE_TABLE[(r["model"], r["innovation"], n)][r["method"]][0]
        ours = float(r["mean_mse"])
        ok = abs(ours - ref) <= TOLERANCE[n]
        hits += ok
        print(f"{r['model']:7} {r['innovation']:9} {n:>5} {r['method']:6} {ours:8.4f} {float(r['sd_mse']):7.4f} "
              f"{ref:6.3f} {ours - ref:+8.4f}{'' if ok else '  *'}")
    print(f"{hits}/{len(rows)} cells within tolerance (* marks misses)")


if __name__ == "__main__":
    main()
