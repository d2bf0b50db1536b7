"""End-to-end analysis pipeline: ingest -> transforms -> unit-root tests ->
cointegration -> lag selection -> VAR estimation -> diagnostics ->
structural decompositions, with per-country concurrency and deterministic
seeding.

All randomness (IRF confidence bands) flows from ``PipelineConfig.seed``,
split per country by input position, so results are byte-identical across
runs and worker counts.
"""

from __future__ import annotations

import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ._version import __version__ as _pkg_version
from .diagnostics import (
    CrossCorrResult,
    LmResult,
    StabilityResult,
    WaldBlockResult,
    granger_wald,
    residual_cross_correlations,
    serial_correlation_lm,
    stability_roots,
)
from .errors import DataError, MacroVarError
from .fetch import VARIABLE_NAMES, WorldBankClient, fetch_indicators
from .series import CountryPanel, align_panel, first_difference
from .stationarity import AdfResult, JohansenResult, adf_test, johansen_test
from .structural import IrfBands, StructuralSet, irf_confidence_bands, structural_analysis
from .varmodel import LagSelection, VarEstimate, VarSpec, estimate_var, select_lag_order

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - version-dependent import
    import tomli as tomllib

__all__ = [
    "PipelineConfig",
    "CountryResult",
    "RunReport",
    "HoldoutEval",
    "run_pipeline",
    "holdout_forecast_eval",
]

_STAGES = (
    "ingest",
    "align",
    "adf_levels",
    "adf_differences",
    "johansen",
    "lag_selection",
    "var_estimation",
    "granger",
    "stability",
    "cross_correlations",
    "lm_tests",
    "structural",
    "irf_bands",
    "holdout",
)


@dataclass(frozen=True)
class PipelineConfig:
    """Run configuration (flat key/value; loadable from TOML)."""

    countries: tuple[str, ...]
    data_source: str = "csv_dir"  # csv_dir | worldbank_fetch
    csv_dir: str | None = None
    hdi_csv: str | None = None
    cache_dir: str = ".macrovar_cache"
    estimate_on: str = "levels"  # levels | differences
    lag_order: int | str = "auto"
    max_lag_search: int = 2
    horizon: int = 10
    ordering: tuple[str, ...] | None = None
    johansen_on: str = "levels"  # levels | differences (literal-wording mode)
    johansen_lags: int = 1
    crosscorr_lags: int = 2
    lm_lags: int = 4
    seed: int = 0
    output_format: str = "markdown"  # markdown | csv | json
    offline: bool = False
    keep_going: bool = False
    irf_band_draws: int = 1000
    workers: int = 1
    holdout: int = 4
    indicator_codes: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "countries", tuple(self.countries))
        if self.ordering is not None:
            object.__setattr__(self, "ordering", tuple(self.ordering))
        if not self.countries:
            raise ValueError("countries must be non-empty")
        if self.data_source not in ("csv_dir", "worldbank_fetch"):
            raise ValueError(f"unknown data_source {self.data_source!r}")
        if self.estimate_on not in ("levels", "differences"):
            raise ValueError(f"unknown estimate_on {self.estimate_on!r}")
        if self.johansen_on not in ("levels", "differences"):
            raise ValueError(f"unknown johansen_on {self.johansen_on!r}")
        if self.output_format not in ("markdown", "csv", "json"):
            raise ValueError(f"unknown output_format {self.output_format!r}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if isinstance(self.lag_order, str):
            if self.lag_order != "auto":
                raise ValueError(f"lag_order must be an integer or 'auto'")
        elif self.lag_order < 1:
            raise ValueError(f"lag_order must be >= 1, got {self.lag_order}")
        if self.max_lag_search < 1:
            raise ValueError(f"max_lag_search must be >= 1")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    @classmethod
    def from_toml(cls, path: str | Path) -> "PipelineConfig":
        """Load a flat key/value TOML file; keys match field names."""
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise DataError(f"{path}: unknown config keys {sorted(unknown)}")
        if "countries" not in raw:
            raise DataError(f"{path}: missing config key 'countries'")
        return cls(**raw)


@dataclass(frozen=True)
class HoldoutEval:
    """Hold-out forecast accuracy (non-normative plumbing utility)."""

    n_holdout: int
    rmse: dict[str, float]
    mae: dict[str, float]


@dataclass
class CountryResult:
    """All per-country artifacts; stages that failed or were not reachable
    appear in ``skipped`` with a reason."""

    country: str
    panel: CountryPanel | None = None
    adf_levels: tuple[AdfResult, ...] = ()
    adf_differences: tuple[AdfResult, ...] = ()
    johansen: JohansenResult | None = None
    lag_selection: LagSelection | None = None
    chosen_lag: int | None = None
    chosen_lag_note: str = ""
    var_estimate: VarEstimate | None = None
    granger: tuple[WaldBlockResult, ...] = ()
    stability: StabilityResult | None = None
    cross_correlations: CrossCorrResult | None = None
    lm_tests: LmResult | None = None
    structural: StructuralSet | None = None
    irf_bands: IrfBands | None = None
    holdout: HoldoutEval | None = None
    notes: list[str] = field(default_factory=list)
    skipped: dict[str, str] = field(default_factory=dict)


@dataclass
class RunReport:
    """Full pipeline output: one CountryResult per requested country plus a
    provenance block describing inputs, configuration, and versions."""

    countries: tuple[CountryResult, ...]
    config: PipelineConfig
    provenance: dict[str, str]


def _forecast(est: VarEstimate, history: np.ndarray, steps: int) -> np.ndarray:
    """Deterministic multi-step forecast from the last p rows of history."""
    p = est.lag_order
    hist = history[-p:].copy()
    out = np.empty((steps, est.n_variables))
    for t in range(steps):
        y_t = est.c.copy()
        for lag in range(1, p + 1):
            y_t = y_t + est.A[lag - 1] @ hist[p - lag]
        out[t] = y_t
        hist = np.vstack([hist[1:], y_t]) if p > 1 else y_t[None, :]
    return out


def holdout_forecast_eval(
    panel: CountryPanel, lag_order: int, n_holdout: int = 4
) -> HoldoutEval:
    """Refit on all but the last ``n_holdout`` rows, forecast them, and
    report RMSE/MAE per variable. Non-normative: a plumbing utility, not a
    statistic from the analysis itself."""
    y = panel.to_matrix()
    t = len(y)
    if n_holdout < 1 or t - n_holdout < lag_order + 1:
        raise DataError(
            f"insufficient observations for a {n_holdout}-step hold-out"
        )
    train = CountryPanel(
        country=panel.country,
        variables=tuple(
            s.window(s.start_year, s.start_year + (t - n_holdout) - 1)
            for s in panel.variables
        ),
        ordering=panel.ordering,
    )
    est = estimate_var(train, VarSpec(lag_order=lag_order))
    pred = _forecast(est, train.to_matrix(), n_holdout)
    err = y[t - n_holdout :] - pred
    rmse = {
        name: float(math.sqrt(np.mean(err[:, i] ** 2)))
        for i, name in enumerate(panel.variable_names)
    }
    mae = {
        name: float(np.mean(np.abs(err[:, i])))
        for i, name in enumerate(panel.variable_names)
    }
    return HoldoutEval(n_holdout=n_holdout, rmse=rmse, mae=mae)


def _difference_panel(panel: CountryPanel) -> CountryPanel:
    return CountryPanel(
        country=panel.country,
        variables=tuple(first_difference(s) for s in panel.variables),
        ordering=panel.ordering,
    )


class _StageRunner:
    """Runs one stage, translating errors per the keep-going policy."""

    def __init__(self, result: CountryResult, keep_going: bool) -> None:
        self.result = result
        self.keep_going = keep_going

    def run(self, stage: str, fn, *deps: str):
        if stage in self.result.skipped:
            return None
        missing = [d for d in deps if d in self.result.skipped]
        if missing:
            self.result.skipped[stage] = f"requires skipped stage {missing[0]}"
            return None
        try:
            return fn()
        except MacroVarError as exc:
            if not self.keep_going:
                raise type(exc)(
                    f"stage {stage} ({self.result.country}): {exc}"
                ) from exc
            self.result.skipped[stage] = str(exc)
            return None


def _run_country(
    config: PipelineConfig, country: str, seed: np.random.SeedSequence
) -> CountryResult:
    result = CountryResult(country=country)
    runner = _StageRunner(result, config.keep_going)

    def ingest() -> CountryPanel:
        client = None
        if config.data_source == "worldbank_fetch":
            client = WorldBankClient(config.cache_dir, offline=config.offline)
        return fetch_indicators(
            country,
            config.data_source,
            csv_dir=config.csv_dir,
            client=client,
            hdi_csv=config.hdi_csv,
            indicator_codes=config.indicator_codes or None,
        )

    raw = runner.run("ingest", ingest)
    panel = runner.run(
        "align",
        lambda: align_panel(raw.variables, ordering=config.ordering or VARIABLE_NAMES),
        "ingest",
    )
    if panel is not None:
        result.panel = panel

    result.adf_levels = runner.run(
        "adf_levels",
        lambda: tuple(adf_test(s) for s in panel.variables),
        "align",
    ) or ()
    result.adf_differences = runner.run(
        "adf_differences",
        lambda: tuple(adf_test(s) for s in _difference_panel(panel).variables),
        "align",
    ) or ()

    def johansen() -> JohansenResult:
        target = panel if config.johansen_on == "levels" else _difference_panel(panel)
        if config.johansen_on == "differences":
            result.notes.append(
                "Cointegration test run on first differences (nonstandard; "
                "levels are the default)."
            )
        return johansen_test(target, lags_in_differences=config.johansen_lags)

    result.johansen = runner.run("johansen", johansen, "align")

    result.lag_selection = runner.run(
        "lag_selection",
        lambda: select_lag_order(panel, config.max_lag_search),
        "align",
    )

    if isinstance(config.lag_order, int):
        result.chosen_lag = config.lag_order
        result.chosen_lag_note = "fixed by configuration"
    elif result.lag_selection is not None:
        majority = result.lag_selection.majority_choice()
        if majority < 1:
            result.chosen_lag = 1
            result.chosen_lag_note = (
                "auto: criteria majority chose lag 0; clamped to minimum lag 1"
            )
        else:
            result.chosen_lag = majority
            result.chosen_lag_note = "auto: majority of LR/FPE/AIC/SC/HQ criteria"
    else:
        result.skipped.setdefault("var_estimation", "requires skipped stage lag_selection")

    def estimate() -> VarEstimate:
        target = panel if config.estimate_on == "levels" else _difference_panel(panel)
        if config.estimate_on == "differences":
            result.notes.append(
                "VAR estimated on first-differenced series per configuration."
            )
            if result.johansen is not None and config.johansen_on == "levels":
                result.notes.append(
                    "Cointegration was tested on levels while estimation uses "
                    "differences; rank conclusions apply to the level system."
                )
        return estimate_var(target, VarSpec(lag_order=result.chosen_lag))

    est = runner.run("var_estimation", estimate, "align")
    result.var_estimate = est

    result.granger = runner.run(
        "granger", lambda: granger_wald(est), "var_estimation"
    ) or ()
    result.stability = runner.run(
        "stability", lambda: stability_roots(est), "var_estimation"
    )
    result.cross_correlations = runner.run(
        "cross_correlations",
        lambda: residual_cross_correlations(est, config.crosscorr_lags),
        "var_estimation",
    )
    result.lm_tests = runner.run(
        "lm_tests",
        lambda: serial_correlation_lm(est, config.lm_lags),
        "var_estimation",
    )
    result.structural = runner.run(
        "structural",
        lambda: structural_analysis(
            est, horizon=config.horizon, ordering=config.ordering
        ),
        "var_estimation",
    )
    if config.irf_band_draws > 0:
        result.irf_bands = runner.run(
            "irf_bands",
            lambda: irf_confidence_bands(
                est,
                horizon=config.horizon,
                ordering=config.ordering,
                n_draws=config.irf_band_draws,
                rng=np.random.default_rng(seed),
            ),
            "var_estimation",
        )
    else:
        result.skipped["irf_bands"] = "disabled by configuration (irf_band_draws = 0)"

    result.holdout = runner.run(
        "holdout",
        lambda: holdout_forecast_eval(panel, result.chosen_lag, config.holdout),
        "var_estimation",
    )
    return result


def run_pipeline(config: PipelineConfig) -> RunReport:
    """Execute the full per-country pipeline and assemble a RunReport.

    Per-country work may run concurrently (``config.workers``); outputs are
    assembled in input order and all stochastic steps draw from per-country
    seeds spawned from ``config.seed``, so reports are reproducible.
    """
    root = np.random.SeedSequence(config.seed)
    children = root.spawn(len(config.countries))
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(_run_country, config, country, child)
                for country, child in zip(config.countries, children)
            ]
            results = tuple(f.result() for f in futures)
    else:
        results = tuple(
            _run_country(config, country, child)
            for country, child in zip(config.countries, children)
        )

    import numpy
    import scipy

    provenance = {
        "tool": f"macrovar {_pkg_version}",
        "data_source": config.data_source,
        "csv_dir": str(config.csv_dir),
        "estimate_on": config.estimate_on,
        "johansen_on": config.johansen_on,
        "lag_order": str(config.lag_order),
        "ordering": ",".join(config.ordering or VARIABLE_NAMES),
        "seed": str(config.seed),
        "horizon": str(config.horizon),
        "irf_band_method": (
            "parametric Monte Carlo (coefficient draws), "
            f"{config.irf_band_draws} draws, 95% pointwise"
        ),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
    }
    return RunReport(countries=results, config=config, provenance=provenance)
