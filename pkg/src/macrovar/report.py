"""Report rendering: markdown, CSV, and JSON views of a RunReport.

Every number in a rendered table is copied from exactly one result object —
the renderer never recomputes statistics. Table text uses 6 significant
digits for statistics and 4 decimals for p-values; the JSON view keeps full
float precision so that parsing it recovers the numeric fields exactly.
Long-form CSV series (impulse responses, variance decomposition, historical
decomposition) are emitted with every format for plotting.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .pipeline import CountryResult, RunReport

__all__ = ["TestReport", "render_report"]


@dataclass(frozen=True)
class TestReport:
    """Generic hypothesis-test row used by the renderers: a statistic, its
    distribution parameters, p-value, critical values, and decision text."""

    name: str
    statistic: float
    params: dict[str, object]
    p_value: float
    critical_values: dict[str, float]
    decision: str


def _fmt_stat(x: object) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if math.isnan(xf):
        return "nan"
    if math.isinf(xf):
        return "inf" if xf > 0 else "-inf"
    return f"{xf:.6g}"


def _fmt_p(x: object) -> str:
    return "" if x is None else f"{float(x):.4f}"


def _md_table(headers: list[str], rows: list[list[str]]) -> str:
    out = ["| " + " | ".join(headers) + " |"]
    out.append("|" + "|".join(" --- " for _ in headers) + "|")
    out.extend("| " + " | ".join(r) + " |" for r in rows)
    return "\n".join(out)


def _csv_text(headers: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return buf.getvalue()


def _complex_str(z: complex) -> str:
    if abs(z.imag) < 1e-12:
        return _fmt_stat(z.real)
    sign = "+" if z.imag >= 0 else "-"
    return f"{_fmt_stat(z.real)} {sign} {_fmt_stat(abs(z.imag))}i"


# --- table row builders ------------------------------------------------------


def _adf_rows(res: CountryResult, which: str) -> list[list[str]]:
    results = res.adf_levels if which == "levels" else res.adf_differences
    rows = []
    for r in results:
        name = r.series_name if which == "levels" else f"D({r.series_name})"
        rows.append(
            [
                res.country,
                name,
                _fmt_stat(r.statistic),
                _fmt_p(r.p_value),
                _fmt_stat(r.critical_values[0.01]),
                _fmt_stat(r.critical_values[0.05]),
                _fmt_stat(r.critical_values[0.10]),
                str(r.lags_used),
                str(r.n_obs),
                r.interpretation,
            ]
        )
    return rows


_ADF_HEADERS = [
    "country", "series", "statistic", "p_value", "cv_1pct", "cv_5pct",
    "cv_10pct", "lags", "n_obs", "interpretation",
]


def _johansen_rows(res: CountryResult) -> list[list[str]]:
    j = res.johansen
    rows = []
    for r, hyp in enumerate(j.hypotheses):
        rows.append(
            [
                res.country,
                hyp,
                _fmt_stat(j.eigenvalues[r]),
                _fmt_stat(j.trace_stats[r]),
                _fmt_stat(j.trace_cv_5pct[r]),
                _fmt_p(j.p_values_trace[r]),
                _fmt_stat(j.max_eigen_stats[r]),
                _fmt_stat(j.max_eigen_cv_5pct[r]),
                _fmt_p(j.p_values_max[r]),
            ]
        )
    return rows


_JOHANSEN_HEADERS = [
    "country", "hypothesis", "eigenvalue", "trace_stat", "trace_cv_5pct",
    "trace_p_approx", "max_eigen_stat", "max_eigen_cv_5pct", "max_eigen_p_approx",
]


def _lag_rows(res: CountryResult) -> list[list[str]]:
    sel = res.lag_selection
    rows = []
    for row in sel.rows:
        cells = [res.country, str(row.lag), _fmt_stat(row.log_l)]
        for crit, value in (
            ("lr", row.lr),
            ("fpe", row.fpe),
            ("aic", row.aic),
            ("sc", row.sc),
            ("hq", row.hq),
        ):
            text = _fmt_stat(value)
            if text and sel.starred.get(crit) == row.lag:
                text += "*"
            cells.append(text)
        rows.append(cells)
    return rows


_LAG_HEADERS = ["country", "lag", "log_l", "lr", "fpe", "aic", "sc", "hq"]


def _coef_rows(res: CountryResult) -> list[list[str]]:
    rows = []
    for eq in res.var_estimate.per_equation:
        for c in eq.coef_table:
            rows.append(
                [
                    res.country,
                    eq.dependent,
                    c.name,
                    _fmt_stat(c.coefficient),
                    _fmt_stat(c.std_error),
                    _fmt_stat(c.t_stat),
                ]
            )
    return rows


_COEF_HEADERS = ["country", "equation", "regressor", "coefficient", "std_error", "t_stat"]


def _eqstat_rows(res: CountryResult) -> list[list[str]]:
    rows = []
    for eq in res.var_estimate.per_equation:
        rows.append(
            [
                res.country,
                eq.dependent,
                _fmt_stat(eq.r_squared),
                _fmt_stat(eq.adj_r_squared),
                _fmt_stat(eq.ssr),
                _fmt_stat(eq.se_equation),
                _fmt_stat(eq.f_stat),
                _fmt_stat(eq.log_likelihood),
            ]
        )
    return rows


_EQSTAT_HEADERS = [
    "country", "equation", "r_squared", "adj_r_squared", "ssr",
    "se_equation", "f_stat", "log_likelihood",
]


def _granger_rows(res: CountryResult) -> list[list[str]]:
    return [
        [
            res.country,
            w.dependent,
            w.excluded,
            _fmt_stat(w.chi_sq),
            str(w.df),
            _fmt_p(w.p_value),
        ]
        for w in res.granger
    ]


_GRANGER_HEADERS = ["country", "dependent", "excluded", "chi_sq", "df", "p_value"]


def _stability_rows(res: CountryResult) -> list[list[str]]:
    s = res.stability
    return [
        [res.country, _complex_str(root), _fmt_stat(mod)]
        for root, mod in zip(s.roots, s.moduli)
    ]


_STABILITY_HEADERS = ["country", "root", "modulus"]


def _crosscorr_rows(res: CountryResult) -> list[list[str]]:
    cc = res.cross_correlations
    rows = []
    for lag, mat in enumerate(cc.matrices):
        for i, vi in enumerate(cc.variable_names):
            for j, vj in enumerate(cc.variable_names):
                rows.append(
                    [res.country, str(lag), vi, vj, _fmt_stat(mat[i, j])]
                )
    return rows


_CROSSCORR_HEADERS = ["country", "lag", "variable", "against", "correlation"]


def _lm_rows(res: CountryResult) -> list[list[str]]:
    rows = []
    for r in res.lm_tests.rows:
        rows.append(
            [
                res.country,
                str(r.lag),
                r.variant,
                _fmt_stat(r.lre_stat),
                str(r.df),
                _fmt_p(r.p_lre),
                _fmt_stat(r.rao_f),
                f"({r.df_pair[0]}, {r.df_pair[1]:.1f})",
                _fmt_p(r.p_rao),
            ]
        )
    return rows


_LM_HEADERS = [
    "country", "lag", "variant", "lre_stat", "df", "p_lre", "rao_f",
    "rao_df", "p_rao",
]


def _holdout_rows(res: CountryResult) -> list[list[str]]:
    h = res.holdout
    return [
        [res.country, name, _fmt_stat(h.rmse[name]), _fmt_stat(h.mae[name])]
        for name in h.rmse
    ]


_HOLDOUT_HEADERS = ["country", "variable", "rmse", "mae"]


# --- long-form series CSVs ---------------------------------------------------


def _irf_csv(report: RunReport) -> str:
    rows = []
    for res in report.countries:
        st = res.structural
        if st is None:
            continue
        bands = res.irf_bands
        for h in range(st.irf.shape[0]):
            for i, var in enumerate(st.variable_names):
                for j, shock in enumerate(st.variable_names):
                    row = [res.country, var, shock, str(h), repr(float(st.irf[h, i, j]))]
                    if bands is not None:
                        row.append(repr(float(bands.lower[h, i, j])))
                        row.append(repr(float(bands.upper[h, i, j])))
                    else:
                        row.extend(["", ""])
                    rows.append(row)
    headers = ["country", "variable", "shock", "horizon", "response", "lower", "upper"]
    return _csv_text(headers, rows)


def _fevd_csv(report: RunReport) -> str:
    shock_names: list[str] = []
    for res in report.countries:
        if res.structural is not None:
            shock_names = list(res.structural.variable_names)
            break
    headers = ["country", "variable", "period", "se"] + [
        f"share_{s}" for s in shock_names
    ]
    rows = []
    for res in report.countries:
        st = res.structural
        if st is None:
            continue
        for i, var in enumerate(st.variable_names):
            for h in range(st.fevd.shape[1]):
                rows.append(
                    [res.country, var, str(h + 1), repr(float(st.fevd_se[i, h]))]
                    + [repr(float(st.fevd[i, h, j])) for j in range(len(shock_names))]
                )
    return _csv_text(headers, rows)


def _hist_csv(report: RunReport) -> str:
    shock_names: list[str] = []
    for res in report.countries:
        if res.structural is not None:
            shock_names = list(res.structural.variable_names)
            break
    headers = ["country", "variable", "year", "actual", "baseline"] + [
        f"contrib_{s}" for s in shock_names
    ]
    rows = []
    for res in report.countries:
        st = res.structural
        if st is None:
            continue
        t_eff = st.hist_actual.shape[0]
        for i, var in enumerate(st.variable_names):
            for t in range(t_eff):
                rows.append(
                    [
                        res.country,
                        var,
                        str(st.hist_start_year + t),
                        repr(float(st.hist_actual[t, i])),
                        repr(float(st.hist_baseline[t, i])),
                    ]
                    + [
                        repr(float(st.hist_contributions[j, t, i]))
                        for j in range(len(shock_names))
                    ]
                )
    return _csv_text(headers, rows)


# --- JSON view ---------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, float) and (math.isnan(obj) or math.isinf(obj)):
        return repr(obj)
    return obj


def _adf_dict(r) -> dict:
    return {
        "series": r.series_name,
        "statistic": r.statistic,
        "p_value": r.p_value,
        "critical_values": {"1%": r.critical_values[0.01],
                            "5%": r.critical_values[0.05],
                            "10%": r.critical_values[0.10]},
        "lags_used": r.lags_used,
        "deterministic": r.deterministic,
        "n_obs": r.n_obs,
        "interpretation": r.interpretation,
    }


def _country_dict(res: CountryResult) -> dict:
    out: dict = {"country": res.country, "notes": list(res.notes),
                 "skipped": dict(res.skipped)}
    if res.panel is not None:
        out["panel"] = {
            "start_year": res.panel.start_year,
            "n_years": res.panel.n_years,
            "variables": list(res.panel.variable_names),
            "ordering": list(res.panel.ordering),
        }
    out["adf_levels"] = [_adf_dict(r) for r in res.adf_levels]
    out["adf_differences"] = [_adf_dict(r) for r in res.adf_differences]
    if res.johansen is not None:
        j = res.johansen
        out["johansen"] = {
            "hypotheses": list(j.hypotheses),
            "eigenvalues": list(j.eigenvalues),
            "trace_stats": list(j.trace_stats),
            "max_eigen_stats": list(j.max_eigen_stats),
            "trace_cv_5pct": list(j.trace_cv_5pct),
            "max_eigen_cv_5pct": list(j.max_eigen_cv_5pct),
            "p_values_trace": list(j.p_values_trace),
            "p_values_max": list(j.p_values_max),
            "p_value_method": "gamma approximation (approximate)",
            "rank_decision": j.rank_decision,
            "lags_in_differences": j.lags_in_differences,
            "deterministic": j.deterministic,
            "t_effective": j.t_effective,
            "interpretation": j.interpretation,
        }
    if res.lag_selection is not None:
        sel = res.lag_selection
        out["lag_selection"] = {
            "t_common": sel.t_common,
            "starred": dict(sel.starred),
            "rows": [
                {"lag": r.lag, "log_l": r.log_l, "lr": r.lr, "fpe": r.fpe,
                 "aic": r.aic, "sc": r.sc, "hq": r.hq}
                for r in sel.rows
            ],
        }
    if res.chosen_lag is not None:
        out["chosen_lag"] = {"lag": res.chosen_lag, "rule": res.chosen_lag_note}
    if res.var_estimate is not None:
        est = res.var_estimate
        out["var_estimate"] = {
            "lag_order": est.lag_order,
            "variable_names": list(est.variable_names),
            "t_effective": est.t_effective,
            "n_regressors": est.n_regressors,
            "intercept": est.c,
            "A": [a for a in est.A],
            "sigma_u": est.sigma_u,
            "sigma_u_ml": est.sigma_u_ml,
            "equations": [
                {
                    "dependent": eq.dependent,
                    "r_squared": eq.r_squared,
                    "adj_r_squared": eq.adj_r_squared,
                    "ssr": eq.ssr,
                    "se_equation": eq.se_equation,
                    "f_stat": eq.f_stat,
                    "log_likelihood": eq.log_likelihood,
                    "coefficients": [
                        {"name": c.name, "coefficient": c.coefficient,
                         "std_error": c.std_error, "t_stat": c.t_stat}
                        for c in eq.coef_table
                    ],
                }
                for eq in est.per_equation
            ],
        }
    if res.granger:
        out["granger"] = [
            {"dependent": w.dependent, "excluded": w.excluded, "chi_sq": w.chi_sq,
             "df": w.df, "p_value": w.p_value}
            for w in res.granger
        ]
    if res.stability is not None:
        out["stability"] = {
            "roots": [{"re": z.real, "im": z.imag} for z in res.stability.roots],
            "moduli": list(res.stability.moduli),
            "stable": res.stability.stable,
            "interpretation": res.stability.interpretation,
        }
    if res.cross_correlations is not None:
        cc = res.cross_correlations
        out["cross_correlations"] = {
            "band": cc.band,
            "t_effective": cc.t_effective,
            "matrices": [m for m in cc.matrices],
        }
    if res.lm_tests is not None:
        out["lm_tests"] = [
            {"lag": r.lag, "variant": r.variant, "lre_stat": r.lre_stat,
             "df": r.df, "p_lre": r.p_lre, "rao_f": r.rao_f,
             "rao_df_num": r.df_pair[0], "rao_df_den": r.df_pair[1],
             "p_rao": r.p_rao}
            for r in res.lm_tests.rows
        ]
    if res.structural is not None:
        st = res.structural
        out["structural"] = {
            "ordering": list(st.ordering),
            "chol_p": st.chol_p,
            "irf": st.irf,
            "fevd": st.fevd,
            "fevd_se": st.fevd_se,
            "hist_actual": st.hist_actual,
            "hist_baseline": st.hist_baseline,
            "hist_contributions": st.hist_contributions,
            "hist_start_year": st.hist_start_year,
        }
    if res.irf_bands is not None:
        out["irf_bands"] = {
            "level": res.irf_bands.level,
            "n_draws": res.irf_bands.n_draws,
            "lower": res.irf_bands.lower,
            "upper": res.irf_bands.upper,
        }
    if res.holdout is not None:
        out["holdout"] = {
            "label": "non-normative hold-out forecast evaluation",
            "n_holdout": res.holdout.n_holdout,
            "rmse": dict(res.holdout.rmse),
            "mae": dict(res.holdout.mae),
        }
    return out


def _report_dict(report: RunReport) -> dict:
    return {
        "provenance": dict(report.provenance),
        "countries": [_country_dict(res) for res in report.countries],
    }


# --- assembly ----------------------------------------------------------------

_SECTIONS: list[tuple[str, str, str, list[str]]] = [
    # (stage key, section title, csv filename stem, headers)
    ("adf_levels", "Unit-root tests (levels)", "adf_levels", _ADF_HEADERS),
    ("adf_differences", "Unit-root tests (first differences)", "adf_differences",
     _ADF_HEADERS),
    ("johansen", "Cointegration rank tests (trace / max eigenvalue)", "johansen",
     _JOHANSEN_HEADERS),
    ("lag_selection", "Lag-order selection", "lag_selection", _LAG_HEADERS),
    ("var_estimation", "VAR coefficient estimates", "var_coefficients",
     _COEF_HEADERS),
    ("var_equation_stats", "VAR per-equation statistics", "var_equation_stats",
     _EQSTAT_HEADERS),
    ("granger", "Granger causality / block exogeneity Wald tests", "granger",
     _GRANGER_HEADERS),
    ("stability", "Stability: companion roots", "stability", _STABILITY_HEADERS),
    ("cross_correlations", "Residual cross-correlations", "cross_correlations",
     _CROSSCORR_HEADERS),
    ("lm_tests", "Residual serial-correlation LM tests", "lm_tests", _LM_HEADERS),
    ("holdout", "Hold-out forecast evaluation (non-normative)", "holdout",
     _HOLDOUT_HEADERS),
]

_BUILDERS = {
    "adf_levels": lambda res: _adf_rows(res, "levels"),
    "adf_differences": lambda res: _adf_rows(res, "differences"),
    "johansen": _johansen_rows,
    "lag_selection": _lag_rows,
    "var_estimation": _coef_rows,
    "var_equation_stats": _eqstat_rows,
    "granger": _granger_rows,
    "stability": _stability_rows,
    "cross_correlations": _crosscorr_rows,
    "lm_tests": _lm_rows,
    "holdout": _holdout_rows,
}

_HAS_RESULT = {
    "adf_levels": lambda res: bool(res.adf_levels),
    "adf_differences": lambda res: bool(res.adf_differences),
    "johansen": lambda res: res.johansen is not None,
    "lag_selection": lambda res: res.lag_selection is not None,
    "var_estimation": lambda res: res.var_estimate is not None,
    "var_equation_stats": lambda res: res.var_estimate is not None,
    "granger": lambda res: bool(res.granger),
    "stability": lambda res: res.stability is not None,
    "cross_correlations": lambda res: res.cross_correlations is not None,
    "lm_tests": lambda res: res.lm_tests is not None,
    "holdout": lambda res: res.holdout is not None,
}


def _skip_reason(res: CountryResult, stage: str) -> str:
    alias = "var_estimation" if stage == "var_equation_stats" else stage
    return res.skipped.get(alias, "not computed")


def _render_markdown(report: RunReport) -> str:
    lines: list[str] = ["# macrovar analysis report", ""]
    lines.append("## Provenance")
    lines.append("")
    for key, value in report.provenance.items():
        lines.append(f"- {key}: {value}")
    lines.append("")

    for res in report.countries:
        lines.append(f"## {res.country}")
        lines.append("")
        if res.panel is not None:
            p = res.panel
            lines.append(
                f"Sample: {p.start_year}-{p.start_year + p.n_years - 1} "
                f"({p.n_years} annual observations); variables: "
                f"{', '.join(p.variable_names)}; shock ordering: "
                f"{', '.join(p.ordering)}."
            )
            lines.append("")
        for note in res.notes:
            lines.append(f"> note: {note}")
            lines.append("")
        if res.chosen_lag is not None:
            lines.append(
                f"Estimation lag order: {res.chosen_lag} ({res.chosen_lag_note})."
            )
            lines.append("")
        for stage, title, _, headers in _SECTIONS:
            lines.append(f"### {title}")
            lines.append("")
            if not _HAS_RESULT[stage](res):
                lines.append(f"_skipped: {_skip_reason(res, stage)}_")
                lines.append("")
                continue
            rows = _BUILDERS[stage](res)
            lines.append(_md_table(headers, rows))
            if stage == "johansen":
                j = res.johansen
                lines.append("")
                lines.append(
                    f"Rank decision: {j.rank_decision}. {j.interpretation} "
                    "(p-values are gamma approximations; decisions use the "
                    "5% critical values.)"
                )
            if stage == "lag_selection":
                lines.append("")
                lines.append("`*` marks the lag chosen by each criterion.")
            if stage == "stability":
                lines.append("")
                lines.append(res.stability.interpretation)
            if stage == "cross_correlations":
                lines.append("")
                lines.append(
                    "Reference band +/- "
                    f"{_fmt_stat(res.cross_correlations.band)} "
                    "(1/sqrt(T))."
                )
            lines.append("")
        st = res.structural
        lines.append("### Variance decomposition, impulse responses, historical decomposition")
        lines.append("")
        if st is None:
            lines.append(f"_skipped: {_skip_reason(res, 'structural')}_")
        else:
            lines.append(
                "Emitted as long-form CSV: fevd.csv, irf.csv, hist_decomp.csv "
                f"(horizon {st.horizon}, ordering {', '.join(st.ordering)})."
            )
        lines.append("")
    return "\n".join(lines)


def render_report(report: RunReport, output_format: str | None = None) -> dict[str, str]:
    """Render a RunReport to named documents.

    Returns a mapping filename -> content. The primary document depends on
    the format ("report.md", "report.json", or per-table CSVs); the
    long-form series CSVs (irf.csv, fevd.csv, hist_decomp.csv) are always
    included.
    """
    fmt = output_format or report.config.output_format
    out: dict[str, str] = {}
    if fmt == "markdown":
        out["report.md"] = _render_markdown(report)
    elif fmt == "json":
        out["report.json"] = json.dumps(
            _jsonable(_report_dict(report)), indent=2, sort_keys=True
        ) + "\n"
    elif fmt == "csv":
        for stage, _, stem, headers in _SECTIONS:
            rows: list[list[str]] = []
            for res in report.countries:
                if _HAS_RESULT[stage](res):
                    rows.extend(_BUILDERS[stage](res))
            out[f"{stem}.csv"] = _csv_text(headers, rows)
        out["provenance.csv"] = _csv_text(
            ["key", "value"], [[k, v] for k, v in report.provenance.items()]
        )
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    out["irf.csv"] = _irf_csv(report)
    out["fevd.csv"] = _fevd_csv(report)
    out["hist_decomp.csv"] = _hist_csv(report)
    return out
