"""Command-line front end.

Subcommands:

* ``fit``          fit the ball-constrained estimator to a dataset CSV
* ``check-bounds`` run the inequality catalogue over a JSON grid
* ``separability`` empirical separation frequency (null or probit model)
* ``simulate``     run an experiment grid from a JSON config to CSV
* ``rates``        log-log rate slope from a report CSV
* ``calibrate``    convert between sigma and the target length
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .bounds import check_bounds, write_bound_reports
from .estimator import FitConfig, fit
from .experiments import ExperimentGrid, ExperimentReport, rate_slope, run_grid
from .model import Dataset, ModelSpec, SeedSpec, sample
from .quadrature import link_value, sigma_to_tau_star, tau_star_to_sigma
from .separability import SeparabilityUndecided, cover_probability, is_separable


def _cmd_fit(args) -> int:
    data = Dataset.from_csv(args.data)
    config = FitConfig(M=args.M, tol=args.tol, max_iter=args.max_iter)
    result = fit(data.X, data.y, config)
    json.dump(result.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_check_bounds(args) -> int:
    with open(args.grid, "r", encoding="utf-8") as fh:
        grid = json.load(fh)
    reports = check_bounds(grid, mc_draws=args.draws, master_seed=args.seed)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_bound_reports(reports, fh)
    else:
        write_bound_reports(reports, sys.stdout)
    failed = sum(r.holds is False for r in reports)
    skipped = sum(r.holds is None for r in reports)
    print(
        f"# {len(reports)} checks: {len(reports) - failed - skipped} hold, "
        f"{failed} fail, {skipped} skipped",
        file=sys.stderr,
    )
    return 1 if failed else 0


def _cmd_separability(args) -> int:
    if (args.sigma is None) == (not args.null):
        raise SystemExit("exactly one of --sigma or --null is required")
    seed_spec = SeedSpec(args.seed)
    separable = 0
    undecided = 0
    for rep in range(args.reps):
        rng = seed_spec.rng(0, rep)
        if args.null:
            X = rng.standard_normal((args.n, args.p))
            y = np.where(rng.random(args.n) < 0.5, 1.0, -1.0)
        else:
            spec = ModelSpec.along_first_axis(args.p, args.sigma)
            data = sample(spec, args.n, rng)
            X, y = data.X, data.y
        try:
            separable += is_separable(X, y, tol=args.tol).separable
        except SeparabilityUndecided:
            undecided += 1
    freq = separable / args.reps
    se = math.sqrt(max(freq * (1.0 - freq), 1.0 / args.reps) / args.reps)
    out = {
        "n": args.n,
        "p": args.p,
        "reps": args.reps,
        "separable_frequency": freq,
        "stderr": se,
        "ci95": [max(0.0, freq - 1.96 * se), min(1.0, freq + 1.96 * se)],
        "undecided": undecided,
    }
    if args.null:
        out["cover_probability"] = cover_probability(args.n, args.p)
    else:
        out["sigma"] = args.sigma
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_simulate(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    grid = ExperimentGrid.from_config(config)
    report = run_grid(grid)
    report.write_csv(args.out)
    stem = args.out[:-4] if args.out.endswith(".csv") else args.out
    dats = report.write_dat_slices(stem)
    print(f"# wrote {len(report.rows)} rows to {args.out}", file=sys.stderr)
    for path in dats:
        print(f"# wrote {path}", file=sys.stderr)
    return 0


def _cmd_rates(args) -> int:
    report = ExperimentReport.read_csv(args.report)
    rs = rate_slope(report, args.metric, args.p, args.sigma)
    json.dump(
        {
            "metric": args.metric,
            "p": args.p,
            "sigma": args.sigma,
            "slope": rs.slope,
            "stderr": rs.stderr,
            "n_values": list(rs.n_values),
            "means": list(rs.means),
        },
        sys.stdout,
        indent=2,
    )
    sys.stdout.write("\n")
    return 0


def _cmd_calibrate(args) -> int:
    if (args.sigma is None) == (args.tau_star is None):
        raise SystemExit("exactly one of --sigma or --tau-star is required")
    if args.sigma is not None:
        sigma = args.sigma
        tau_star = sigma_to_tau_star(sigma)
    else:
        tau_star = args.tau_star
        sigma = tau_star_to_sigma(tau_star)
    json.dump(
        {"sigma": sigma, "tau_star": tau_star, "link_value": link_value(tau_star)},
        sys.stdout,
        indent=2,
    )
    sys.stdout.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="problogit",
        description="Ball-constrained logistic regression on probit data: "
        "estimation, inequality checks, and rate experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit the estimator to a dataset CSV")
    p_fit.add_argument("--data", required=True, help="CSV with columns x1..xp,y")
    p_fit.add_argument("--M", type=float, required=True, help="constraint radius")
    p_fit.add_argument("--tol", type=float, default=1e-8)
    p_fit.add_argument("--max-iter", type=int, default=200_000, dest="max_iter")
    p_fit.set_defaults(func=_cmd_fit)

    p_cb = sub.add_parser("check-bounds", help="run the inequality catalogue")
    p_cb.add_argument("--grid", required=True, help="JSON array of {lemma_id, params}")
    p_cb.add_argument("--out", help="output CSV (default: stdout)")
    p_cb.add_argument("--draws", type=int, default=10_000_000)
    p_cb.add_argument("--seed", type=int, default=20_240_801)
    p_cb.set_defaults(func=_cmd_check_bounds)

    p_sep = sub.add_parser("separability", help="empirical separation frequency")
    p_sep.add_argument("--n", type=int, required=True)
    p_sep.add_argument("--p", type=int, required=True)
    p_sep.add_argument("--reps", type=int, required=True)
    p_sep.add_argument("--seed", type=int, required=True)
    p_sep.add_argument("--sigma", type=float, help="probit labels at this noise level")
    p_sep.add_argument(
        "--null", action="store_true", help="labels independent uniform signs"
    )
    p_sep.add_argument("--tol", type=float, default=1e-9)
    p_sep.set_defaults(func=_cmd_separability)

    p_sim = sub.add_parser("simulate", help="run an experiment grid")
    p_sim.add_argument("--config", required=True, help="JSON experiment config")
    p_sim.add_argument("--out", required=True, help="output report CSV")
    p_sim.set_defaults(func=_cmd_simulate)

    p_rates = sub.add_parser("rates", help="log-log rate slope from a report")
    p_rates.add_argument("--report", required=True)
    p_rates.add_argument("--metric", choices=["beta_err", "tau_err"], required=True)
    p_rates.add_argument("--p", type=int, required=True)
    p_rates.add_argument("--sigma", type=float, required=True)
    p_rates.set_defaults(func=_cmd_rates)

    p_cal = sub.add_parser("calibrate", help="convert sigma <-> target length")
    p_cal.add_argument("--sigma", type=float)
    p_cal.add_argument("--tau-star", type=float, dest="tau_star")
    p_cal.set_defaults(func=_cmd_calibrate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
