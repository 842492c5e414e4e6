"""Command line interface: ``clusterindex {estimate,diagnose,oracle,simulate,experiment}``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import estimators
from .experiment import _round, emit_report, load_config, report_csv, report_json, run_experiment
from .functionals import parse_functional
from .oracle import TailProcessModel, oracle_report
from .series import order_statistic, read_csv, validate_scheme, write_csv
from .simulate import generate, parse_process


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _dump(obj, out) -> None:
    text = json.dumps(_round(obj), indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_estimate(args) -> int:
    series = read_csv(args.input, args.norm)
    functional = parse_functional(args.functional)
    if args.mode in ("disjoint", "sliding"):
        if args.k is None:
            raise SystemExit("--k is required for disjoint and sliding modes")
        scheme = validate_scheme(series.n, args.r_n, args.k)
        fn = estimators.estimate_disjoint if args.mode == "disjoint" else estimators.estimate_sliding
        result = fn(series, functional, scheme)
    elif args.mode == "sliding-pseudo":
        if args.c is None or args.p is None:
            raise SystemExit("--c and --p are required for sliding-pseudo")
        result = estimators.estimate_sliding_pseudo(series, functional, args.r_n, args.c, args.p)
    else:
        if args.c is None:
            raise SystemExit("--c is required for sliding-quasi")
        result = estimators.estimate_sliding_quasi(series, functional, args.r_n, args.c)
    _dump(result.to_dict(), args.out)
    return 0


def cmd_diagnose(args) -> int:
    series = read_csv(args.input, args.norm)
    if args.c is not None:
        c = args.c
    elif args.k is not None:
        c = order_statistic(series.norms, args.k).value
    else:
        raise SystemExit("give a threshold with --c or --k")
    if args.which == "dh":
        header = ("k", "p_hat")
        rows = estimators.dh_diagnostic(series, c, args.x, args.y, _ints(args.grid), args.r_n)
    elif args.which == "s":
        header = ("m", "s_hat")
        rows = estimators.s_condition_diagnostic(series, c, args.s, args.t, _ints(args.grid), args.r_n)
    else:
        header = ("epsilon", "a_hat")
        rows = estimators.ansjb_diagnostic(series, c, args.eta, _floats(args.grid), args.r_n)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for key, val in rows:
            writer.writerow([key, f"{val:.12g}"])
    finally:
        if args.out:
            out.close()
    return 0


def cmd_oracle(args) -> int:
    model = TailProcessModel.parse(args.model)
    functionals = [parse_functional(f) for f in args.functionals.split(",") if f.strip()]
    report = oracle_report(model, functionals, args.samples, args.seed, args.m_max)
    _dump(report.to_dict(), args.out)
    return 0


def cmd_simulate(args) -> int:
    spec = parse_process(args.process, n=args.n, seed=args.seed, burn_in=args.burn_in)
    series = generate(spec)
    write_csv(series, args.out if args.out else sys.stdout)
    return 0


def cmd_experiment(args) -> int:
    config = load_config(args.config)
    report = run_experiment(config, workers=args.workers)
    out = args.out or config.out
    if out:
        emit_report(report, out, args.format)
    else:
        sys.stdout.write(report_json(report) if args.format == "json" else report_csv(report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clusterindex",
                                     description="Cluster index estimation for regularly varying time series.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate a cluster index from a CSV series (JSON output)")
    p.add_argument("--input", required=True, help="CSV file, one row per time point")
    p.add_argument("--functional", required=True,
                   help="exc | extremal | cluster-size:m=M | stop-loss:eta=E | large-dev | ruin")
    p.add_argument("--r-n", type=int, required=True, help="block length")
    p.add_argument("--k", type=int, help="number of upper order statistics")
    p.add_argument("--c", type=float, help="fixed threshold (pseudo/quasi modes)")
    p.add_argument("--p", type=float, help="known P(||X_0|| > c) (pseudo mode)")
    p.add_argument("--mode", choices=estimators.MODES, default="sliding")
    p.add_argument("--norm", choices=("euclidean", "sup", "l1"), default="euclidean")
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("diagnose", help="DH / S / ANSJB condition diagnostics (CSV output)")
    p.add_argument("which", choices=("dh", "s", "ansjb"))
    p.add_argument("--input", required=True)
    p.add_argument("--r-n", type=int, required=True)
    p.add_argument("--c", type=float, help="threshold; default is the k-th order statistic")
    p.add_argument("--k", type=int)
    p.add_argument("--grid", required=True, help="comma separated k (dh), m (s) or epsilon (ansjb) values")
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--y", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--norm", choices=("euclidean", "sup", "l1"), default="euclidean")
    p.add_argument("--out")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("oracle", help="tail-process oracle values (JSON output)")
    p.add_argument("--model", required=True, help="iid:alpha=1 | ar1:rho=0.5,alpha=1 | ma1:b=0.7,alpha=1.5")
    p.add_argument("--functionals", default="extremal,cluster-size:m=1")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m-max", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="simulate a process (CSV output)")
    p.add_argument("--process", required=True, help="same grammar as --model of the oracle command")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="Monte Carlo comparison of sliding and disjoint estimators")
    p.add_argument("--config", required=True, help="flat key = value file")
    p.add_argument("--workers", type=int, help="worker processes (overridden by CLUSTERINDEX_WORKERS)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="overrides the config's out key")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
