"""Command-line interface.

Exit status: 0 on success (whatever the zone), 2 on usage or input errors,
3 when the comparative statistic is degenerate.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import __version__
from .comparative import (
    DegenerateSeriesError,
    IidSample,
    NeweyWest,
    comparative_backtest,
    comparative_backtest_var,
)
from .reports import (
    InputError,
    Report,
    read_columns,
    series_from_columns,
    write_outcomes_csv,
    write_series_csv,
)
from .scoring import GChoice, ScoringSpec
from .sim import ScenarioConfig, ZoneSummary, replication_rng, run_experiment, simulate_data
from .traditional import TrafficLightConfig, es_coverage_test, traffic_light_var

EXIT_USAGE = 2
EXIT_DEGENERATE = 3

_G2_CHOICES = {
    "logistic": GChoice.BOUNDED_LOGISTIC,
    "exponential": GChoice.EXPONENTIAL,
    "zero": GChoice.ZERO,
}


class UsageError(Exception):
    pass


def _variance(text: str):
    if text == "iid":
        return IidSample()
    if text.startswith("nw:"):
        try:
            return NeweyWest(int(text[3:]))
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(f"expected 'iid' or 'nw:<lag>', got {text!r}")


def _probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1): {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esbacktest",
        description="Comparative and traditional backtests for VaR and Expected Shortfall.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fmt_kw = dict(choices=("text", "machine"), default="text",
                  help="human-readable text or a JSON document")

    p = sub.add_parser("compare", help="Diebold-Mariano comparison of internal vs standard forecasts")
    p.add_argument("input", help="CSV with columns x, v, e, v_star, e_star")
    p.add_argument("--alpha", type=_probability, default=0.025, help="risk level (default 0.025)")
    p.add_argument("--g2", choices=sorted(_G2_CHOICES), default="logistic",
                   help="G2 in the joint score; 'zero' scores VaR only")
    p.add_argument("--variance", type=_variance, default=IidSample(), metavar="{iid|nw:<lag>}",
                   help="estimator of the standard deviation of the mean score difference")
    p.add_argument("--level", type=_probability, default=0.05, help="test level eta (default 0.05)")
    p.add_argument("--format", **fmt_kw)

    p = sub.add_parser("coverage", help="traditional coverage backtest of one forecast set")
    p.add_argument("input", help="CSV with x, v (traffic) or pit (es) columns")
    p.add_argument("--test", choices=("traffic", "es"), required=True)
    p.add_argument("--alpha", type=_probability, default=None,
                   help="risk level (default 0.01 for traffic, 0.025 for es)")
    p.add_argument("--n", type=_positive_int, default=None,
                   help="expected window length (default: number of rows)")
    p.add_argument("--format", **fmt_kw)

    p = sub.add_parser("simulate", help="Monte Carlo study of all four backtests")
    p.add_argument("--scenario", choices=("A", "B"), default="A")
    p.add_argument("--n", type=_positive_int, default=250)
    p.add_argument("--reps", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--format", **fmt_kw)
    p.add_argument("--dump-reps", metavar="PATH", help="write per-replication zones to CSV")
    p.add_argument("--dump-series", metavar="PATH",
                   help="write one replication's data and joint-level forecasts to CSV")
    p.add_argument("--series-rep", type=int, default=0, metavar="INDEX",
                   help="replication exported by --dump-series (default 0)")
    return parser


def _compare(args) -> Report:
    g2 = _G2_CHOICES[args.g2]
    need_es = g2 is not GChoice.ZERO
    required = ("x", "v", "e", "v_star", "e_star") if need_es else ("x", "v", "v_star")
    cols = read_columns(args.input, required)
    series = series_from_columns(cols, need_es=need_es)
    if len(series) < 2:
        raise UsageError("comparative backtest needs at least two rows")
    if isinstance(args.variance, NeweyWest) and args.variance.lag >= len(series):
        raise UsageError("Newey-West lag must be smaller than the number of rows")
    if need_es:
        spec = ScoringSpec(args.alpha, GChoice.IDENTITY, g2)
        result = comparative_backtest(spec, series, args.variance, args.level)
    else:
        result = comparative_backtest_var(GChoice.IDENTITY, args.alpha, series, args.variance, args.level)
    config = {
        "input": str(args.input),
        "alpha": args.alpha,
        "g1": GChoice.IDENTITY.value,
        "g2": g2.value,
        "variance": args.variance.describe(),
        "level": args.level,
    }
    return Report("compare", config, result)


def _coverage(args) -> Report:
    if args.test == "traffic":
        alpha = 0.01 if args.alpha is None else args.alpha
        cols = read_columns(args.input, ("x", "v"))
        n = args.n if args.n is not None else cols["x"].size
        if cols["x"].size != n:
            raise UsageError(f"--n {n} does not match the {cols['x'].size} rows in the input")
        if n < 1:
            raise UsageError("input has no rows")
        result = traffic_light_var(TrafficLightConfig(level=alpha, n=n), cols["v"], cols["x"])
    else:
        alpha = 0.025 if args.alpha is None else args.alpha
        cols = read_columns(args.input, ("pit",))
        n = args.n if args.n is not None else cols["pit"].size
        if cols["pit"].size != n:
            raise UsageError(f"--n {n} does not match the {cols['pit'].size} rows in the input")
        if n < 1:
            raise UsageError("input has no rows")
        try:
            result = es_coverage_test(alpha, cols["pit"], n)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    config = {"input": str(args.input), "test": args.test, "alpha": alpha, "n": n}
    return Report("coverage", config, result)


def _simulate(args) -> Report:
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    cfg = ScenarioConfig(scenario=args.scenario, n=args.n, reps=args.reps, seed=args.seed)
    if args.dump_series and not 0 <= args.series_rep < cfg.reps:
        raise UsageError("--series-rep must index an existing replication")
    summary, outcomes = run_experiment(cfg, keep_outcomes=True)
    if args.dump_reps:
        write_outcomes_csv(args.dump_reps, outcomes)
    if args.dump_series:
        data = simulate_data(cfg.n, replication_rng(cfg.seed, args.series_rep))
        write_series_csv(
            args.dump_series,
            data.forecasts(cfg.scenario, cfg.joint_level),
            pits=data.internal_pits(cfg.scenario),
        )
    return Report("simulate", cfg.to_dict(), summary)


def format_text(report: Report) -> str:
    res = report.result
    cfg = report.config
    if isinstance(res, ZoneSummary):
        title = (
            f"Scenario {cfg['scenario']}: N = {cfg['n']}, {cfg['reps']} replications, "
            f"seed {cfg['seed']} (percent of decisions)"
        )
        return res.format_table(title)
    if report.kind == "comparative":
        return "\n".join([
            f"comparative backtest  alpha={cfg['alpha']}  g2={cfg['g2']}  "
            f"variance={cfg['variance']}  level={cfg['level']}",
            f"N                         {res.n}",
            f"mean score internal       {res.mean_score_internal:.6f}",
            f"mean score standard       {res.mean_score_standard:.6f}",
            f"T2                        {res.t2:.6f}",
            f"sigma_N                   {res.sigma_n:.6g}",
            f"p H0- (at least as good)  {res.p_superior:.6f}",
            f"p H0+ (at most as good)   {res.p_inferior:.6f}",
            f"zone                      {res.zone.value.upper()}",
        ])
    label = "exceedances" if cfg["test"] == "traffic" else "Z"
    stat = f"{int(res.statistic)}" if cfg["test"] == "traffic" else f"{res.statistic:.6f}"
    return "\n".join([
        f"coverage backtest  test={cfg['test']}  alpha={cfg['alpha']}  n={cfg['n']}",
        f"{label:<12} {stat}",
        f"p-value      {res.p_value:.6g}",
        f"zone         {res.zone.value.upper()}",
    ])


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"compare": _compare, "coverage": _coverage, "simulate": _simulate}
    try:
        report = handlers[args.command](args)
    except DegenerateSeriesError as exc:
        print(f"esbacktest {args.command}: degenerate statistic: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (UsageError, InputError, ValueError, OSError) as exc:
        print(f"esbacktest {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = report.to_json() if args.format == "machine" else format_text(report)
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
