"""Command-line interface.

Subcommands: ``run`` (full pipeline from a TOML config), ``adf`` (unit-root
test on one CSV column), ``var`` (VAR estimation tables for one CSV), and
``irf`` (impulse responses for one CSV). Exit codes: 0 success, 2 data
error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import DataError, NumericError
from .fetch import read_country_csv
from .pipeline import PipelineConfig, run_pipeline
from .report import _csv_text, _fmt_p, _fmt_stat, _md_table, render_report
from .series import align_panel, first_difference
from .stationarity import adf_test
from .structural import structural_analysis
from .varmodel import VarSpec, estimate_var

__all__ = ["main"]

# Short aliases accepted in --ordering / --column.
_ALIASES = {
    "hdi": "hdi",
    "health": "gov_exp_health",
    "gov_exp_health": "gov_exp_health",
    "edu": "gov_exp_edu",
    "education": "gov_exp_edu",
    "gov_exp_edu": "gov_exp_edu",
}


def _resolve(name: str) -> str:
    try:
        return _ALIASES[name.strip().lower()]
    except KeyError:
        raise DataError(
            f"unknown variable {name!r}; use hdi, health, or edu"
        ) from None


def _panel_from_csv(path: str):
    raw = read_country_csv(path)
    return align_panel(raw.variables, ordering=raw.ordering)


def _cmd_run(args: argparse.Namespace) -> int:
    config = PipelineConfig.from_toml(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.offline:
        overrides["offline"] = True
    if args.keep_going:
        overrides["keep_going"] = True
    if args.format is not None:
        overrides["output_format"] = args.format
    if overrides:
        config = replace(config, **overrides)
    report = run_pipeline(config)
    documents = render_report(report)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, content in documents.items():
        (out_dir / name).write_text(content, encoding="utf-8")
    for name in documents:
        print(out_dir / name)
    skipped = sum(len(res.skipped) for res in report.countries)
    if skipped:
        print(f"warning: {skipped} stage(s) skipped; see report", file=sys.stderr)
    return 0


def _cmd_adf(args: argparse.Namespace) -> int:
    panel = _panel_from_csv(args.csv)
    series = panel.get(_resolve(args.column))
    if args.diff:
        series = first_difference(series)
    lag_rule = args.lags if args.lags is not None else "info_criterion"
    res = adf_test(series, max_lags=args.max_lags, lag_rule=lag_rule)
    name = f"D({res.series_name})" if args.diff else res.series_name
    rows = [[
        name,
        _fmt_stat(res.statistic),
        _fmt_p(res.p_value),
        _fmt_stat(res.critical_values[0.01]),
        _fmt_stat(res.critical_values[0.05]),
        _fmt_stat(res.critical_values[0.10]),
        str(res.lags_used),
        str(res.n_obs),
    ]]
    print(_md_table(
        ["series", "statistic", "p_value", "cv_1pct", "cv_5pct", "cv_10pct",
         "lags", "n_obs"],
        rows,
    ))
    print()
    print(res.interpretation)
    return 0


def _cmd_var(args: argparse.Namespace) -> int:
    panel = _panel_from_csv(args.csv)
    est = estimate_var(panel, VarSpec(lag_order=args.lags))
    coef_rows = []
    for eq in est.per_equation:
        for c in eq.coef_table:
            coef_rows.append([
                eq.dependent, c.name, _fmt_stat(c.coefficient),
                _fmt_stat(c.std_error), _fmt_stat(c.t_stat),
            ])
    print(_md_table(
        ["equation", "regressor", "coefficient", "std_error", "t_stat"],
        coef_rows,
    ))
    print()
    stat_rows = [
        [eq.dependent, _fmt_stat(eq.r_squared), _fmt_stat(eq.adj_r_squared),
         _fmt_stat(eq.ssr), _fmt_stat(eq.se_equation), _fmt_stat(eq.f_stat),
         _fmt_stat(eq.log_likelihood)]
        for eq in est.per_equation
    ]
    print(_md_table(
        ["equation", "r_squared", "adj_r_squared", "ssr", "se_equation",
         "f_stat", "log_likelihood"],
        stat_rows,
    ))
    return 0


def _cmd_irf(args: argparse.Namespace) -> int:
    panel = _panel_from_csv(args.csv)
    ordering = None
    if args.ordering:
        ordering = tuple(_resolve(v) for v in args.ordering.split(","))
    est = estimate_var(panel, VarSpec(lag_order=args.lags))
    st = structural_analysis(est, horizon=args.horizon, ordering=ordering)
    rows = []
    for h in range(st.irf.shape[0]):
        for i, var in enumerate(st.variable_names):
            for j, shock in enumerate(st.variable_names):
                rows.append([var, shock, str(h), repr(float(st.irf[h, i, j]))])
    headers = ["variable", "shock", "horizon", "response"]
    if args.format == "csv":
        sys.stdout.write(_csv_text(headers, rows))
    else:
        print(_md_table(headers, [[r[0], r[1], r[2], _fmt_stat(float(r[3]))]
                                  for r in rows]))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macrovar",
        description="VAR toolkit for annual country panels: unit-root and "
        "cointegration tests, VAR estimation, causality, and structural "
        "decompositions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full pipeline from a config file")
    p_run.add_argument("--config", required=True, help="TOML configuration file")
    p_run.add_argument("--output", default="macrovar_out", help="output directory")
    p_run.add_argument("--format", choices=["markdown", "csv", "json"],
                       help="override the configured output format")
    p_run.add_argument("--seed", type=int, help="override the configured seed")
    p_run.add_argument("--offline", action="store_true",
                       help="never touch the network (cache hits only)")
    p_run.add_argument("--keep-going", action="store_true",
                       help="mark failed stages as skipped instead of aborting")
    p_run.set_defaults(func=_cmd_run)

    p_adf = sub.add_parser("adf", help="ADF unit-root test on one CSV column")
    p_adf.add_argument("csv", help="country CSV (year,hdi,gov_exp_health,gov_exp_edu)")
    p_adf.add_argument("--column", default="hdi", help="variable to test")
    p_adf.add_argument("--diff", action="store_true", help="test the first difference")
    p_adf.add_argument("--lags", type=int, default=None,
                       help="fixed lag count (default: information-criterion search)")
    p_adf.add_argument("--max-lags", type=int, default=None,
                       help="cap for the lag search")
    p_adf.set_defaults(func=_cmd_adf)

    p_var = sub.add_parser("var", help="estimate a VAR and print its tables")
    p_var.add_argument("csv")
    p_var.add_argument("--lags", type=int, default=2, help="lag order (default 2)")
    p_var.set_defaults(func=_cmd_var)

    p_irf = sub.add_parser("irf", help="orthogonalized impulse responses")
    p_irf.add_argument("csv")
    p_irf.add_argument("--lags", type=int, default=2, help="lag order (default 2)")
    p_irf.add_argument("--horizon", type=int, default=10)
    p_irf.add_argument("--ordering", default=None,
                       help="comma-separated shock ordering, e.g. hdi,health,edu")
    p_irf.add_argument("--format", choices=["csv", "markdown"], default="csv")
    p_irf.set_defaults(func=_cmd_irf)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except (DataError, NotImplementedError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
