"""Command line: ``sparsegibbs {simulate,fit,experiment,bounds}``.

Exit status is 0 on success, 2 on invalid input and 1 on any other failure.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .baselines import aic_select, aic_select_yw, ar_holdout_risk, ols_ar_fit, yule_walker_path
from .basis import make_basis
from .bounds import (BoundError, BoundInputs, MixingProfile, approximation_factor, corollary_min_n,
                     k_phi_sup, oracle_remainder, sparse_corollary_bound, theorem_lambda)
from .config import (BASELINE_ESTIMATORS, ExperimentConfig, parse_float, parse_list, load_kv, make_sampler_config,
                     sampler_overrides)
from .core import TimeSeries, ValidationError
from .experiment import run_experiment
from .sampler import DEFAULT_B, fit_gibbs, heuristic_lambda
from .simulate import InnovationSpec, ProcessSpec, model_spec, simulate

log = logging.getLogger("sparsegibbs")


def write_series_csv(path: Path, series: TimeSeries) -> None:
    lines = ["index,value"] + [f"{i},{v!r}" for i, v in enumerate(series.values.tolist(), start=1)]
    path.write_text("\n".join(lines) + "\n")


def read_series_csv(path: str | Path) -> TimeSeries:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["index", "value"]:
            raise ValidationError(f"{path}: header must be 'index,value', got {header}")
        values = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ValidationError(f"{path}:{lineno}: expected 2 columns")
            try:
                values.append(float(row[1]))
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: bad value {row[1]!r}") from None
    if not values:
        raise ValidationError(f"{path}: no data rows")
    return TimeSeries(values)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def format_report(items: Mapping[str, object]) -> str:
    return "".join(f"{k}={_fmt(v)}\n" for k, v in items.items())


def _config(path: Optional[str]) -> dict[str, str]:
    return load_kv(path) if path else {}


def _innovation(kv: Mapping[str, str], kind: str) -> InnovationSpec:
    a = parse_float(kv.get("innovation.a", "0.70"))
    sigma = parse_float(kv.get("innovation.sigma", "0.4"))
    return InnovationSpec(kind, a=a, sigma=sigma)


def cmd_simulate(args) -> int:
    kv = _config(args.config)
    model = args.model or kv.get("simulate.model", "align1")
    innovation = _innovation(kv, args.innovation or kv.get("simulate.innovation", "uniform"))
    length = args.length if args.length is not None else int(kv.get("simulate.length", "200"))
    burn_in = int(kv.get("simulate.burn_in", "1000"))
    seed = args.seed if args.seed is not None else int(kv.get("simulate.seed", "0"))
    if "simulate.kind" in kv:
        coeffs = tuple(parse_float(c) for c in parse_list(kv.get("simulate.coeffs", "")))
        spec = ProcessSpec(kv["simulate.kind"], coeffs, innovation, burn_in)
    else:
        spec = model_spec(model, innovation, burn_in)
    series = simulate(spec, length, seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "series.csv"
    write_series_csv(path, series)
    print(path)
    return 0


def fit_report(series: TimeSeries, method: str, kv: Mapping[str, str], seed: int) -> dict:
    q = int(kv.get("fit.q", "20"))
    if series.n <= q + 1:
        raise ValidationError(f"series of length {series.n} is too short for q={q}")
    report: dict[str, object] = {"method": method, "n": series.n, "q": q}
    if method == "gibbs":
        b = parse_float(kv.get("fit.b", str(DEFAULT_B)))
        lam = parse_float(kv["fit.lambda"]) if "fit.lambda" in kv else heuristic_lambda(series)
        basis = make_basis("ar_linear", q)
        config = make_sampler_config(lam, b, sampler_overrides(kv), seed)
        theta, diag = fit_gibbs(series, basis, b=b, lambda_opt=lam, config=config)
        report.update({
            "lambda": diag.lam, "b": diag.b, "seed": diag.seed, "n_iter": diag.n_iter, "n_burn": diag.n_burn,
            "train_risk": diag.train_risk,
            "acceptance.birth": diag.acceptance["birth"], "acceptance.death": diag.acceptance["death"],
            "acceptance.update": diag.acceptance["update"],
            "mean_support_size": diag.mean_support_size,
            "support": list(theta.support), "coefficients": theta.to_dense().tolist(),
        })
        return report
    baseline = kv.get("fit.baseline", "yw")
    if baseline not in BASELINE_ESTIMATORS:
        raise ValidationError(f"fit.baseline must be one of {BASELINE_ESTIMATORS}")
    if method == "aic":
        fit = aic_select(series, q, q) if baseline == "ols" else aic_select_yw(series, q)
    elif method == "full":
        fit = ols_ar_fit(series, q, q) if baseline == "ols" else yule_walker_path(series, q)[q]
    else:
        raise ValidationError(f"unknown method {method!r}")
    dense = list(fit.coeffs) + [0.0] * (q - fit.order)
    report.update({"baseline": baseline, "order": fit.order, "intercept": fit.intercept, "aic": fit.aic,
                   "train_risk": ar_holdout_risk(fit, series, q).empirical_risk, "coefficients": dense})
    return report


def cmd_fit(args) -> int:
    kv = _config(args.config)
    series = read_series_csv(args.series)
    seed = args.seed if args.seed is not None else int(kv.get("fit.seed", "0"))
    report = fit_report(series, args.method, kv, seed)
    text = format_report(report)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"fit_{args.method}.txt").write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_experiment(args) -> int:
    kv = _config(args.config)
    if args.seed is not None:
        kv["experiment.master_seed"] = str(args.seed)
    if args.timing:
        kv["experiment.timing"] = "true"
    config = ExperimentConfig.from_mapping(kv)
    results, summary = run_experiment(config, args.out, jobs=args.jobs)
    print(results)
    print(summary)
    return 0


_BOUND_KEYS = {"n": int, "q": int, "p": int, "b": float, "B": float, "Phi_q": float,
               "eta": float, "epsilon": float, "support_size": int}


def bound_inputs(kv: Mapping[str, str]) -> BoundInputs:
    """Build inputs; ``Phi_q`` may be replaced by ``profile.kind``/``profile.values``."""
    values: dict[str, object] = {}
    for key, conv in _BOUND_KEYS.items():
        if key in kv:
            try:
                values[key] = conv(parse_float(kv[key]) if conv is float else kv[key])
            except ValueError:
                raise ValidationError(f"bad value for {key}: {kv[key]!r}") from None
    if "Phi_q" not in values and "profile.kind" in kv and "q" in values:
        profile = MixingProfile(kv["profile.kind"], tuple(parse_float(v) for v in parse_list(kv.get("profile.values", ""))),
                                parse_float(kv.get("profile.phi0", "1")))
        values["Phi_q"] = k_phi_sup(profile, int(values["q"]))
    missing = [k for k in _BOUND_KEYS if k not in values]
    if missing:
        raise ValidationError(f"missing bound inputs: {', '.join(missing)}")
    return BoundInputs(**values)


def bounds_report(inputs: BoundInputs) -> dict:
    report: dict[str, object] = {
        "lambda": theorem_lambda(inputs),
        "remainder": oracle_remainder(inputs),
        "approximation_factor": approximation_factor(inputs.eta),
        "support_cap": inputs.support_cap,
        "Phi_q": inputs.Phi_q,
    }
    p0 = inputs.support_size
    if p0 >= 1:
        report["sparse_bound"] = sparse_corollary_bound(inputs.n, inputs.q, inputs.p, inputs.b, inputs.B,
                                                        inputs.Phi_q, inputs.eta, inputs.epsilon, p0)
        report["sparse_bound_min_n"] = corollary_min_n(inputs.q, inputs.b, inputs.Phi_q, inputs.eta, p0)
    return report


def cmd_bounds(args) -> int:
    text = format_report(bounds_report(bound_inputs(load_kv(args.inputs))))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "bounds.txt").write_text(text)
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsegibbs", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a series and write series.csv")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default=".")
    p.add_argument("--model", choices=("align1", "align2", "align3"))
    p.add_argument("--innovation", choices=("uniform", "gaussian"))
    p.add_argument("--length", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit one method to a series CSV")
    p.add_argument("series")
    p.add_argument("--method", choices=("gibbs", "aic", "full"), default="gibbs")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("experiment", help="run the simulation study")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", default="results")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="fill the wall_ms column of results.csv")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("bounds", help="evaluate the oracle-inequality arithmetic")
    p.add_argument("inputs")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except BoundError as exc:
        print(f"error: inadmissible bound inputs: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
