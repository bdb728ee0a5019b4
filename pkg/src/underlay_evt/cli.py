"""Command-line front end.

Subcommands write CSV (header row, ``,`` separated, floats as shortest
round-trip ``repr``) to ``--out`` or stdout.

Exit status: 0 success, 1 comparison failure, 2 configuration error,
3 quadrature failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Optional, Sequence

from . import asymptotics, montecarlo
from .config import (
    ConfigError,
    RunConfig,
    build_config,
    parse_assignment,
    parse_grid,
    read_config_file,
)
from .figures import FIGURE_IDS, figure, preset_settings
from .specfun import DomainError, QuadratureError

EXIT_OK = 0
EXIT_COMPARE_FAIL = 1
EXIT_CONFIG = 2
EXIT_QUADRATURE = 3

OK = "ok"
QUAD_FAIL = "quadrature_failure"


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def write_csv(header: Sequence[str], rows, out_path: Optional[str]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    text = buf.getvalue()
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def load_config(args) -> RunConfig:
    settings: dict[str, str] = {}
    if args.preset:
        settings.update(preset_settings(args.preset))
    if args.config:
        settings.update(read_config_file(args.config))
    for item in args.set or ():
        key, value = parse_assignment(item)
        settings[key] = value
    if args.trials is not None:
        settings["trials"] = str(args.trials)
    if args.seed is not None:
        settings["seed"] = str(args.seed)
    if args.out is not None:
        settings["out"] = args.out
    return build_config(settings)


def asymptotic_value(metric, params, csi, b_factor: float = 1.0) -> tuple[float, float, str]:
    try:
        res = asymptotics.evaluate(metric, params, csi, b_factor=b_factor)
    except QuadratureError as exc:
        return math.nan, exc.error, QUAD_FAIL
    return res.value, res.quadrature_err, OK


def _sweep_header(cfg: RunConfig) -> list[str]:
    return [cfg.sweep[0]] if cfg.sweep else []


def _sweep_cell(cfg: RunConfig, x) -> list:
    return [x] if cfg.sweep else []


def _mc_results(cfg: RunConfig, threads: int):
    requests = [(m, p, c) for _, m, p, c in cfg.points()]
    return montecarlo.estimate_many(requests, cfg.n_trials, cfg.seed, threads, cfg.secondary)


def cmd_asymptotic(cfg: RunConfig, args) -> int:
    rows = []
    failed = False
    for x, metric, p, csi in cfg.points():
        value, err, status = asymptotic_value(metric, p, csi, cfg.b_factor)
        failed |= status != OK
        rows.append(_sweep_cell(cfg, x) + [value, err, status])
    write_csv(_sweep_header(cfg) + ["asymptotic", "quadrature_err", "status"], rows, cfg.output_path)
    return EXIT_QUADRATURE if failed else EXIT_OK


def cmd_simulate(cfg: RunConfig, args) -> int:
    rows = []
    for (x, *_), res in zip(cfg.points(), _mc_results(cfg, args.threads)):
        rows.append(_sweep_cell(cfg, x) + [res.mean, res.std_error, res.n_trials, res.seed])
    write_csv(_sweep_header(cfg) + ["mc_mean", "mc_stderr", "n_trials", "seed"], rows, cfg.output_path)
    return EXIT_OK


def compare_row(asym: float, mc_mean: float, mc_se: float, rel_tol: float) -> tuple[float, float, bool]:
    """(rel_err, tolerance, passed); fails iff rel_err > max(rel_tol, 3 se / |mean|)."""
    if mc_mean == 0.0:
        rel_err = 0.0 if asym == 0.0 else math.inf
        tol = rel_tol
    else:
        rel_err = abs(asym - mc_mean) / abs(mc_mean)
        tol = max(rel_tol, 3.0 * mc_se / abs(mc_mean))
    passed = not rel_err > tol
    return rel_err, tol, passed


def cmd_compare(cfg: RunConfig, args) -> int:
    rows = []
    n_fail = 0
    quad_failed = False
    for (x, metric, p, csi), res in zip(cfg.points(), _mc_results(cfg, args.threads)):
        value, err, status = asymptotic_value(metric, p, csi, cfg.b_factor)
        if status != OK:
            quad_failed = True
            rel_err, tol, passed = math.nan, args.rel_tol, False
        else:
            rel_err, tol, passed = compare_row(value, res.mean, res.std_error, args.rel_tol)
        n_fail += not passed
        rows.append(
            _sweep_cell(cfg, x)
            + [value, err, res.mean, res.std_error, rel_err, tol, "pass" if passed else "FAIL"]
        )
    header = _sweep_header(cfg) + [
        "asymptotic",
        "quadrature_err",
        "mc_mean",
        "mc_stderr",
        "rel_err",
        "tolerance",
        "result",
    ]
    write_csv(header, rows, cfg.output_path)
    print(f"compare: {len(rows) - n_fail}/{len(rows)} points within tolerance", file=sys.stderr)
    if quad_failed:
        return EXIT_QUADRATURE
    return EXIT_COMPARE_FAIL if n_fail else EXIT_OK


def cmd_convergence(cfg: RunConfig, args) -> int:
    grid = parse_grid("n_users", args.n_grid)
    p = cfg.params
    rows = []
    prev = None
    for n in grid:
        if n < max(2, p.k_rank):
            raise ConfigError(f"N = {n} is too small for k = {p.k_rank}")
        d = montecarlo.ks_statistic(p.replace(n_users=n), cfg.n_trials, cfg.seed, args.threads)
        rows.append([n, d, None if prev is None else d < prev])
        prev = d
    write_csv(["n_users", "ks_distance", "decreased"], rows, cfg.output_path)
    monotone = all(r[2] for r in rows[1:])
    print(f"convergence: KS distance monotone decreasing in N: {'yes' if monotone else 'no'}", file=sys.stderr)
    return EXIT_OK


def cmd_figure(args) -> int:
    if args.figure_id not in FIGURE_IDS:
        raise ConfigError(f"unknown figure {args.figure_id!r}; choose from {', '.join(FIGURE_IDS)}")
    data = figure(args.figure_id)
    trials = args.trials if args.trials is not None else 100_000
    seed = 0 if args.seed is None else args.seed
    mc = [None] * len(data.points)
    if not args.no_mc:
        requests = [(pt.metric, pt.params, pt.csi) for pt in data.points]
        mc = montecarlo.estimate_many(requests, trials, seed, args.threads)
    rows = []
    failed = False
    for pt, res in zip(data.points, mc):
        value, err, status = asymptotic_value(pt.metric, pt.params, pt.csi)
        failed |= status != OK
        mc_cols = [None, None] if res is None else [res.mean, res.std_error]
        rows.append(list(pt.labels) + [value, err] + mc_cols + [status])
    header = list(data.label_names) + ["asymptotic", "quadrature_err", "mc_mean", "mc_stderr", "status"]
    write_csv(header, rows, args.out)
    return EXIT_QUADRATURE if failed else EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trials", type=_positive_int, help="Monte Carlo trials (default 100000)")
    common.add_argument("--seed", type=_seed, help="64-bit RNG seed (default 0)")
    common.add_argument("--out", help="write CSV here instead of stdout")
    common.add_argument("--threads", type=_positive_int, default=1, help="MC worker threads; never changes results")

    configured = argparse.ArgumentParser(add_help=False)
    configured.add_argument("--config", help="key = value configuration file")
    configured.add_argument("--preset", choices=FIGURE_IDS, help="start from a figure's parameter set")
    configured.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one setting")

    parser = argparse.ArgumentParser(
        prog="underlay-evt",
        description="Asymptotic vs Monte Carlo performance of k-th best user selection in underlay networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("asymptotic", parents=[common, configured], help="evaluate the asymptotic metric")
    sub.add_parser("simulate", parents=[common, configured], help="Monte Carlo estimate of the metric")
    cmp = sub.add_parser("compare", parents=[common, configured], help="asymptotic vs Monte Carlo report")
    cmp.add_argument("--rel-tol", type=float, default=0.02, help="relative tolerance (default 0.02)")
    conv = sub.add_parser("convergence", parents=[common, configured], help="KS distance to the limit law vs N")
    conv.add_argument("--n-grid", default="10,50,200,1000", help="N values, list or start:stop:step")
    fig = sub.add_parser("figure", parents=[common], help="CSV data of one figure")
    fig.add_argument("figure_id", help=f"one of {', '.join(FIGURE_IDS)}")
    fig.add_argument("--no-mc", action="store_true", help="asymptotic columns only")
    return parser


COMMANDS = {
    "asymptotic": cmd_asymptotic,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "convergence": cmd_convergence,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "figure":
            return cmd_figure(args)
        cfg = load_config(args)
        if cfg.n_trials < montecarlo.MIN_TRIALS and args.command in ("simulate", "compare"):
            raise ConfigError(f"trials must be >= {montecarlo.MIN_TRIALS}")
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureError as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE


if __name__ == "__main__":
    sys.exit(main())
