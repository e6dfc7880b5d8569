"""Command-line front end.

Subcommands::

    fit       per-year distribution fits from a year,income CSV
    cycle     u-v series and cycle coefficients from a directory of fits
    simulate  Lotka-Volterra trajectory
    sample    synthetic incomes from given or reference parameters
    report    print the per-year summary (and cycle) of earlier runs

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__, fitting
from .empirical import (
    YearConfig,
    gini_raw,
    normalize,
    population_shares,
    read_income_csv,
    read_year_config,
)
from .exceptions import (
    ConvergenceError,
    CycleError,
    DataError,
    DomainError,
    GoodwinGpdError,
    IntegrationError,
    ParameterError,
)
from .goodwin import (
    MIN_SERIES_LENGTH,
    LvCoefficients,
    UvPoint,
    UvSeries,
    estimate_lv,
    growth_rates,
    read_uv_csv,
    uv_from_fit,
    uv_from_sample,
    write_uv_csv,
)
from .gpd import GpdParams, gini_analytic
from .lv_sim import SimConfig, integrate, measure_period, sample_gpd, write_trajectory_csv
from .records import RunManifest, load_fit_records, params_from_record, read_json, write_json, write_table
from .reference import REFERENCE_BY_YEAR
from .synthetic import ramp_minimum_wages

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NONCONVERGENCE = 0, 1, 2, 3

SUMMARY_COLUMNS = [
    "year", "x_t", "eta", "b", "alpha", "gini_raw", "gini", "mean_check",
    "below_xd_pct", "below_minwage_pct", "below_xt_pct", "u_pct", "v_pct", "converged",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _year_value(text: str) -> tuple[int, float]:
    try:
        year, value = text.split("=", 1)
        return int(year), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YEAR=VALUE, got {text!r}") from None


def _seed_for_year(seed: int, year: int) -> int:
    return int(np.random.SeedSequence([seed, year]).generate_state(1, dtype=np.uint64)[0])


def _manifest(args, subcommand, inputs=(), config=None, seed=None, **options) -> RunManifest:
    return RunManifest(
        subcommand=subcommand,
        inputs=tuple(str(p) for p in inputs),
        config=None if config is None else str(config),
        outdir=None if getattr(args, "outdir", None) is None else str(args.outdir),
        seed=seed,
        options=options,
    )


# -- fit ---------------------------------------------------------------------

def _fit_year(raw, cfg: YearConfig, fixed_xt, opts):
    s = normalize(raw)
    rec = {"year": s.year, "n": s.n, "scale": s.scale, "gini_raw": gini_raw(s)}
    x_d, minwage = cfg.thresholds(s.scale)
    rec.update({"x_d": x_d, "minimum_wage": minwage, "x_d_fraction": cfg.x_d_fraction})
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", fitting.MeanCheckWarning)
            result = fitting.fit_full(
                s,
                x_t=fixed_xt,
                candidates=None if fixed_xt is not None else fitting.threshold_candidates(s, opts["percentiles"]),
                max_points=opts["max_points"],
                max_iter=opts["max_iter"],
            )
    except ConvergenceError as exc:
        rec.update({"params": None, "converged": False, "error": str(exc)})
        return rec, EXIT_NONCONVERGENCE
    p = result.params
    rec["params"] = {**p.as_dict(), "pareto_scale": p.pareto_scale}
    rec["fit"] = result.as_dict()
    rec["gini"] = gini_analytic(p)
    rec["mean_check"] = result.mean_check
    rec["converged"] = result.converged
    rec["error"] = None
    status = EXIT_OK if result.converged else EXIT_NONCONVERGENCE
    try:
        shares = population_shares(s, cfg, p)
        rec["shares_pct"] = {k: 100.0 * v for k, v in shares._asdict().items()}
        fit_uv = uv_from_fit(p, x_d, year=s.year)
        raw_uv = uv_from_sample(s, p.x_t, x_d)
        rec["uv_fit"] = {"u": fit_uv.u, "v": fit_uv.v}
        rec["uv_raw"] = {"u": raw_uv.u, "v": raw_uv.v}
    except (DataError, DomainError) as exc:
        rec["shares_pct"] = rec["uv_fit"] = rec["uv_raw"] = None
        rec["error"] = str(exc)
        status = max(status, EXIT_DATA)
    return rec, status


def _summary_row(rec):
    p = rec.get("params") or {}
    sh = rec.get("shares_pct") or {}
    uv = rec.get("uv_fit") or {}
    return [
        rec["year"], p.get("x_t"), p.get("eta"), p.get("b"), p.get("alpha"),
        rec.get("gini_raw"), rec.get("gini"), rec.get("mean_check"),
        sh.get("below_xd"), sh.get("below_minimum_wage"), sh.get("below_xt"),
        uv.get("u"), uv.get("v"), rec.get("converged"),
    ]


def cmd_fit(args) -> int:
    samples = read_income_csv(args.input)
    configs = read_year_config(args.config)
    missing = sorted(set(samples) - set(configs))
    if missing:
        raise DataError(f"{args.config}: no minimum wage for years {missing}")
    fixed = {y: c.x_t for y, c in configs.items() if c.x_t is not None}
    fixed.update(dict(args.fixed_xt or []))
    small = [y for y, s in samples.items() if not s.fit_eligible]
    if small:
        raise DataError(f"years {small} have fewer than 100 incomes")
    opts = {
        "percentiles": tuple(args.percentiles),
        "max_points": args.max_points,
        "max_iter": args.max_iter,
    }
    manifest = _manifest(
        args, "fit", inputs=[args.input], config=args.config, seed=args.seed,
        fixed_xt={str(k): v for k, v in sorted(fixed.items())}, **opts,
    )
    results = []
    worst = EXIT_OK
    for year, raw in samples.items():
        rec, status = _fit_year(raw, configs[year], fixed.get(year), opts)
        if rec.get("error"):
            print(f"year {year}: {rec['error']}", file=sys.stderr)
        results.append(rec)
        worst = max(worst, status)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    units = "units: incomes and thresholds in mean-income units; shares, u and v in percent"
    for rec in results:
        write_json(outdir / f"fit_{rec['year']}.json", {**rec, "units": units, "manifest": manifest.as_dict()})
    write_table(
        outdir / "summary.csv", SUMMARY_COLUMNS, [_summary_row(r) for r in results],
        header_lines=[manifest.header_line(), units],
    )
    return worst


# -- cycle -------------------------------------------------------------------

def _series_from_fits(directory, configs, source):
    points = []
    for rec in load_fit_records(directory):
        year = rec["year"]
        if source == "raw":
            uv = rec.get("uv_raw")
            if not uv:
                raise DataError(f"year {year}: no raw u-v values in fit record")
            points.append(UvPoint(year, uv["u"], uv["v"]))
            continue
        p = params_from_record(rec)
        x_d = rec["x_d"]
        if configs and year in configs:
            x_d, _ = configs[year].thresholds(rec["scale"])
        points.append(uv_from_fit(p, x_d, year=year))
    return UvSeries(points)


def cmd_cycle(args) -> int:
    if (args.fits is None) == (args.uv is None):
        raise UsageError("give exactly one of FITS_DIR or --uv")
    configs = read_year_config(args.config) if args.config else None
    if args.uv is not None:
        series = read_uv_csv(args.uv)
        inputs = [args.uv]
    else:
        series = _series_from_fits(args.fits, configs, args.source)
        inputs = [args.fits]
    if len(series) < MIN_SERIES_LENGTH:
        raise DataError(
            f"cycle estimation needs at least {MIN_SERIES_LENGTH} consecutive years, got {len(series)}"
        )
    manifest = _manifest(args, "cycle", inputs=inputs, config=args.config, source=args.source)
    units = "units: u and v in percent; a1, a2 per year; b1, b2 per year per percentage point; T in years"
    header = [manifest.header_line(), units]
    table = growth_rates(series)
    status = EXIT_OK
    record = {"manifest": manifest.as_dict(), "units": units, "years": series.years.tolist()}
    try:
        coeffs = estimate_lv(series)
    except CycleError as exc:
        print(str(exc), file=sys.stderr)
        record.update({"error": str(exc), "diagnostics": exc.diagnostics})
        coeffs, status = None, EXIT_DATA
    else:
        record.update(coeffs.as_dict())
        record["error"] = None

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_uv_csv(outdir / "uv_series.csv", series, header)
    rows = []
    for i, year in enumerate(table.years):
        fit_u = fit_v = None
        if coeffs is not None:
            fit_u = -coeffs.a1 + coeffs.b1 * table.v[i]
            fit_v = coeffs.a2 - coeffs.b2 * table.u[i]
        rows.append([
            int(year), table.u[i], table.v[i], table.du_dt[i], table.dv_dt[i],
            table.u_growth[i], table.v_growth[i], fit_u, fit_v,
        ])
    write_table(
        outdir / "regression.csv",
        ["year", "u", "v", "du_dt", "dv_dt", "u_growth", "v_growth", "u_growth_fit", "v_growth_fit"],
        rows,
        header_lines=header,
    )
    write_json(outdir / "lv_coefficients.json", record)
    return status


# -- simulate / sample -------------------------------------------------------

def cmd_simulate(args) -> int:
    coeffs = LvCoefficients(args.a1, args.b1, args.a2, args.b2)
    cfg = SimConfig(coeffs, tuple(args.initial), args.dt, args.t_end)
    traj = integrate(cfg)
    manifest = _manifest(
        args, "simulate", a1=args.a1, b1=args.b1, a2=args.a2, b2=args.b2,
        initial=list(args.initial), dt=args.dt, t_end=args.t_end, stride=args.stride,
    )
    try:
        period = measure_period(traj)
    except DataError:
        period = None
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    units = "units: t in years; x prey (employment), y predator (wage share); H first integral"
    write_trajectory_csv(outdir / "trajectory.csv", traj, [manifest.header_line(), units], stride=args.stride)
    write_json(outdir / "simulation.json", {
        "manifest": manifest.as_dict(),
        "coefficients": coeffs.as_dict(),
        "max_h_drift": traj.max_drift(),
        "measured_period": period,
        "linear_period": coeffs.period,
    })
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.params is not None:
        if args.reference_year:
            raise UsageError("--params and --reference-year are mutually exclusive")
        year = args.year if args.year is not None else 0
        targets = {year: GpdParams(*args.params)}
    elif args.reference_year:
        unknown = [y for y in args.reference_year if y not in REFERENCE_BY_YEAR]
        if unknown:
            raise UsageError(f"no reference fit for years {unknown}")
        targets = {y: REFERENCE_BY_YEAR[y].params for y in sorted(set(args.reference_year))}
    elif args.all_reference_years:
        targets = {y: r.params for y, r in sorted(REFERENCE_BY_YEAR.items())}
    else:
        raise UsageError("give --params, --reference-year or --all-reference-years")
    manifest = _manifest(
        args, "sample", seed=args.seed, n=args.n,
        params={str(y): p.as_dict() for y, p in targets.items()},
        minimum_wage_ramp=args.minimum_wage_ramp,
    )
    single = len(targets) == 1
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with (outdir / "sample.csv").open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {manifest.header_line()}\n# units: income in mean-income units of the source distribution\n")
        fh.write("year,income\n")
        for year, p in targets.items():
            seed = args.seed if single else _seed_for_year(args.seed, year)
            s = sample_gpd(p, args.n, seed, year=year)
            fh.writelines(f"{year},{v!r}\n" for v in s.values.tolist())
    if args.minimum_wage_ramp:
        wages = ramp_minimum_wages(targets)
        write_json(outdir / "config.json", {
            "manifest": manifest.as_dict(),
            "years": {str(y): {"annual_minimum_wage": w, "x_d_fraction": 0.5} for y, w in wages.items()},
        })
    return EXIT_OK


# -- report ------------------------------------------------------------------

def _fmt(v, spec):
    return "-" if v is None else format(v, spec)


def cmd_report(args) -> int:
    records = load_fit_records(args.fits)
    out = sys.stdout
    out.write(f"{'year':>4} {'x_t':>6} {'eta':>6} {'b':>6} {'alpha':>6} {'[Gini]':>7} {'Gini':>6} "
              f"{'mean':>6} {'<x_d%':>6} {'<mw%':>6} {'<x_t%':>6} {'u%':>7} {'v%':>7}\n")
    for rec in records:
        row = _summary_row(rec)
        year, x_t, eta, b, alpha, graw, g, m, sd, sm, st, u, v, conv = row
        out.write(
            f"{year:>4} {_fmt(x_t, '6.3f')} {_fmt(eta, '6.3f')} {_fmt(b, '6.3f')} {_fmt(alpha, '6.3f')} "
            f"{_fmt(graw, '7.3f')} {_fmt(g, '6.3f')} {_fmt(m, '6.3f')} {_fmt(sd, '6.2f')} {_fmt(sm, '6.2f')} "
            f"{_fmt(st, '6.2f')} {_fmt(u, '7.3f')} {_fmt(v, '7.3f')}{'' if conv else '  (not converged)'}\n"
        )
    if args.cycle:
        rec = read_json(Path(args.cycle) / "lv_coefficients.json")
        if rec.get("error"):
            out.write(f"cycle: {rec['error']}\n")
        else:
            out.write(
                f"cycle: a1={rec['a1']:.5g} b1={rec['b1']:.5g} a2={rec['a2']:.5g} b2={rec['b2']:.5g} "
                f"center (u, v)=({rec['u_c']:.2f}, {rec['v_c']:.2f}) T={rec['T']:.2f} years\n"
            )
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="goodwin-gpd", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit the distribution for every year of an income CSV")
    p.add_argument("input", help="CSV with header year,income")
    p.add_argument("--config", required=True, help="JSON mapping year -> annual minimum wage")
    p.add_argument("--outdir", required=True)
    p.add_argument("--seed", type=int, default=None, help="recorded in the manifest only")
    p.add_argument("--fixed-xt", type=_year_value, action="append", metavar="YEAR=XT",
                   help="use this threshold (normalized units) instead of searching")
    p.add_argument("--percentiles", type=float, nargs=3, metavar=("START", "STOP", "STEP"),
                   default=list(fitting.DEFAULT_PERCENTILES))
    p.add_argument("--max-points", type=int, default=fitting.DEFAULT_MAX_POINTS)
    p.add_argument("--max-iter", type=int, default=fitting.DEFAULT_MAX_ITER)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("cycle", help="estimate the Goodwin cycle from per-year fits")
    p.add_argument("fits", nargs="?", help="directory written by 'fit'")
    p.add_argument("--uv", help="re-estimate from a year,u,v CSV instead")
    p.add_argument("--config", help="override x_d from this minimum-wage config")
    p.add_argument("--source", choices=("fit", "raw"), default="fit",
                   help="u-v from fitted distributions or from the raw data")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("simulate", help="integrate the Lotka-Volterra equations")
    for name in ("a1", "b1", "a2", "b2"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--initial", type=float, nargs=2, required=True, metavar=("X0", "Y0"),
                   help="initial prey (employment) and predator (wage share)")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--stride", type=int, default=1, help="write every STRIDE-th step")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sample", help="draw synthetic incomes")
    p.add_argument("--params", type=float, nargs=4, metavar=("XT", "ETA", "B", "ALPHA"))
    p.add_argument("--year", type=int, help="year label for --params")
    p.add_argument("--reference-year", type=int, action="append")
    p.add_argument("--all-reference-years", action="store_true")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--minimum-wage-ramp", action="store_true",
                   help="also write config.json with minimum wages ramping 32%% -> 45%% population share")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("report", help="print the per-year summary table")
    p.add_argument("fits", help="directory written by 'fit'")
    p.add_argument("--cycle", help="directory written by 'cycle'")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"goodwin-gpd {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, DomainError, ParameterError, CycleError, OSError) as exc:
        print(f"goodwin-gpd {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConvergenceError, IntegrationError) as exc:
        print(f"goodwin-gpd {args.command}: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except GoodwinGpdError as exc:
        print(f"goodwin-gpd {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
