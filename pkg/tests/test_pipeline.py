"""Tests for the end-to-end pipeline: config validation, TOML loading,
stage orchestration, keep-going skip propagation, hold-out evaluation,
and seeded determinism."""

from __future__ import annotations

import csv
import math

import numpy as np
import pytest

from macrovar.errors import DataError
from macrovar.pipeline import (
    HoldoutEval,
    PipelineConfig,
    RunReport,
    holdout_forecast_eval,
    run_pipeline,
)
from macrovar.varmodel import VarSpec, estimate_var

from conftest import REPO_ROOT, SYNTHETIC_DIR

ALL_STAGES = (
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


def make_config(**overrides) -> PipelineConfig:
    base = dict(
        countries=("bangladesh",),
        data_source="csv_dir",
        csv_dir=str(SYNTHETIC_DIR),
        seed=9,
        irf_band_draws=50,
    )
    base.update(overrides)
    return PipelineConfig(**base)


# ---------------------------------------------------------------------------
# PipelineConfig validation
# ---------------------------------------------------------------------------


class TestConfigValidation:
    def test_defaults(self):
        cfg = PipelineConfig(countries=["x"])
        assert cfg.countries == ("x",)
        assert cfg.data_source == "csv_dir"
        assert cfg.lag_order == "auto"
        assert cfg.max_lag_search == 2
        assert cfg.horizon == 10
        assert cfg.johansen_lags == 1
        assert cfg.crosscorr_lags == 2
        assert cfg.lm_lags == 4
        assert cfg.seed == 0
        assert cfg.output_format == "markdown"
        assert cfg.offline is False
        assert cfg.keep_going is False
        assert cfg.irf_band_draws == 1000
        assert cfg.workers == 1
        assert cfg.holdout == 4

    def test_sequences_coerced_to_tuples(self):
        cfg = PipelineConfig(countries=["a", "b"], ordering=["hdi", "x", "y"])
        assert isinstance(cfg.countries, tuple)
        assert isinstance(cfg.ordering, tuple)

    def test_empty_countries_rejected(self):
        with pytest.raises(ValueError, match="countries"):
            PipelineConfig(countries=[])

    @pytest.mark.parametrize(
        "field, value, match",
        [
            ("data_source", "ftp", "data_source"),
            ("estimate_on", "logs", "estimate_on"),
            ("johansen_on", "levels_and_trend", "johansen_on"),
            ("output_format", "pdf", "output_format"),
            ("horizon", 0, "horizon"),
            ("lag_order", "bic", "lag_order"),
            ("lag_order", 0, "lag_order"),
            ("max_lag_search", 0, "max_lag_search"),
            ("workers", 0, "workers"),
        ],
    )
    def test_invalid_values_rejected(self, field, value, match):
        with pytest.raises(ValueError, match=match):
            PipelineConfig(countries=["x"], **{field: value})


class TestFromToml:
    def test_bundled_example_config_loads(self):
        cfg = PipelineConfig.from_toml(REPO_ROOT / "configs" / "run.toml")
        assert cfg.countries == ("bangladesh", "india", "pakistan")
        assert cfg.data_source == "csv_dir"
        assert cfg.csv_dir == "data/synthetic"
        assert cfg.seed == 42
        assert cfg.ordering == ("hdi", "gov_exp_health", "gov_exp_edu")

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text('countries = ["x"]\nturbo = true\n')
        with pytest.raises(DataError, match="unknown config keys.*turbo"):
            PipelineConfig.from_toml(path)

    def test_missing_countries_rejected(self, tmp_path):
        path = tmp_path / "empty.toml"
        path.write_text('seed = 3\n')
        with pytest.raises(DataError, match="missing config key 'countries'"):
            PipelineConfig.from_toml(path)

    def test_invalid_value_surfaces_as_value_error(self, tmp_path):
        path = tmp_path / "bad_value.toml"
        path.write_text('countries = ["x"]\nhorizon = 0\n')
        with pytest.raises(ValueError, match="horizon"):
            PipelineConfig.from_toml(path)


# ---------------------------------------------------------------------------
# Full run on the bundled synthetic panels
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def full_report() -> RunReport:
    cfg = make_config(countries=("bangladesh", "india", "pakistan"))
    return run_pipeline(cfg)


class TestFullRun:
    def test_results_in_input_order(self, full_report):
        assert [r.country for r in full_report.countries] == [
            "bangladesh",
            "india",
            "pakistan",
        ]

    def test_no_stage_skipped(self, full_report):
        for result in full_report.countries:
            assert result.skipped == {}, result.skipped

    def test_every_artifact_populated(self, full_report):
        for r in full_report.countries:
            assert r.panel is not None
            assert len(r.adf_levels) == 3 and len(r.adf_differences) == 3
            assert r.johansen is not None
            assert r.lag_selection is not None
            assert r.var_estimate is not None
            assert len(r.granger) == 9
            assert r.stability is not None and r.stability.stable
            assert r.cross_correlations is not None
            assert r.lm_tests is not None
            assert r.structural is not None
            assert r.irf_bands is not None
            assert r.holdout is not None

    def test_auto_lag_choice(self, full_report):
        for r in full_report.countries:
            assert r.chosen_lag == 2
            assert r.chosen_lag_note == "auto: majority of LR/FPE/AIC/SC/HQ criteria"

    def test_provenance_is_stringly_typed_and_time_free(self, full_report):
        prov = full_report.provenance
        assert all(isinstance(k, str) and isinstance(v, str) for k, v in prov.items())
        assert prov["seed"] == "9"
        assert prov["lag_order"] == "auto"
        assert prov["ordering"] == "hdi,gov_exp_health,gov_exp_edu"
        assert "50 draws" in prov["irf_band_method"]
        assert prov["numpy"] == np.__version__
        lowered = " ".join(prov.values()).lower()
        for word in ("date", "time", "2026"):
            assert word not in lowered

    def test_holdout_artifact(self, full_report):
        hold = full_report.countries[0].holdout
        assert isinstance(hold, HoldoutEval)
        assert hold.n_holdout == 4
        names = full_report.countries[0].panel.variable_names
        assert set(hold.rmse) == set(names) == set(hold.mae)
        for name in names:
            assert hold.rmse[name] >= hold.mae[name] >= 0.0


class TestConfigVariants:
    def test_fixed_lag_order(self):
        report = run_pipeline(make_config(lag_order=1, irf_band_draws=0))
        result = report.countries[0]
        assert result.chosen_lag == 1
        assert result.chosen_lag_note == "fixed by configuration"
        assert result.var_estimate.lag_order == 1

    def test_irf_bands_disabled(self):
        report = run_pipeline(make_config(irf_band_draws=0))
        result = report.countries[0]
        assert result.irf_bands is None
        assert result.skipped == {
            "irf_bands": "disabled by configuration (irf_band_draws = 0)"
        }

    def test_estimate_on_differences(self):
        report = run_pipeline(make_config(estimate_on="differences", irf_band_draws=0))
        result = report.countries[0]
        est = result.var_estimate
        # Differencing drops one observation before the lags are taken.
        t_rows = len(result.panel.variables[0].values)
        assert est.t_effective == (t_rows - 1) - est.lag_order
        joined = " ".join(result.notes)
        assert "first-differenced series" in joined
        assert "rank conclusions apply to the level system" in joined

    def test_johansen_on_differences_notes(self):
        report = run_pipeline(make_config(johansen_on="differences", irf_band_draws=0))
        result = report.countries[0]
        assert any("nonstandard" in note for note in result.notes)


# ---------------------------------------------------------------------------
# keep-going policy and stage skip propagation
# ---------------------------------------------------------------------------


class TestKeepGoing:
    def test_missing_country_fails_fast_with_stage_prefix(self):
        cfg = make_config(countries=("atlantis",))
        with pytest.raises(DataError, match=r"stage ingest \(atlantis\):.*file not found"):
            run_pipeline(cfg)

    def test_missing_country_skips_everything_downstream(self):
        cfg = make_config(countries=("atlantis", "bangladesh"), keep_going=True)
        report = run_pipeline(cfg)
        broken, healthy = report.countries
        assert sorted(broken.skipped) == sorted(ALL_STAGES)
        assert "file not found" in broken.skipped["ingest"]
        assert broken.skipped["align"] == "requires skipped stage ingest"
        assert broken.skipped["granger"] == "requires skipped stage var_estimation"
        assert broken.panel is None and broken.var_estimate is None
        assert healthy.skipped == {}
        assert healthy.var_estimate is not None

    def test_short_panel_skips_only_unreachable_stages(self, tmp_path):
        # 12 usable rows: the rank test still runs, but the ADF response
        # surface needs 20 effective observations and a lag search up to 2
        # needs more data, so estimation and everything after it skip.
        path = tmp_path / "shortland.csv"
        rng = np.random.default_rng(8)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["year", "hdi", "gov_exp_health", "gov_exp_edu"])
            for i in range(12):
                writer.writerow(
                    [
                        2000 + i,
                        f"{0.5 + 0.01 * i + 0.005 * rng.standard_normal():.6f}",
                        f"{1.0 + 0.05 * rng.standard_normal():.6f}",
                        f"{250.0 + 2.0 * rng.standard_normal():.4f}",
                    ]
                )
        cfg = make_config(
            countries=("shortland",),
            csv_dir=str(tmp_path),
            keep_going=True,
            lm_lags=8,
        )
        result = run_pipeline(cfg).countries[0]
        assert result.panel is not None
        assert result.johansen is not None
        assert "ingest" not in result.skipped and "align" not in result.skipped
        assert "critical values unavailable" in result.skipped["adf_levels"]
        assert "insufficient observations" in result.skipped["lag_selection"]
        assert (
            result.skipped["var_estimation"] == "requires skipped stage lag_selection"
        )
        for stage in ("granger", "stability", "lm_tests", "holdout", "irf_bands"):
            assert result.skipped[stage] == "requires skipped stage var_estimation"

    def test_error_type_preserved_when_failing_fast(self, tmp_path):
        # A constant column makes the Dickey-Fuller regression collinear;
        # fail-fast mode must re-raise the same error type, stage-prefixed.
        path = tmp_path / "flatland.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["year", "hdi", "gov_exp_health", "gov_exp_edu"])
            for i in range(30):
                writer.writerow([1990 + i, "0.500000", f"{1.0 + 0.01 * i:.6f}", "250.0"])
        from macrovar.errors import NumericError

        cfg = make_config(countries=("flatland",), csv_dir=str(tmp_path))
        with pytest.raises(NumericError, match=r"stage adf_levels \(flatland\):"):
            run_pipeline(cfg)


# ---------------------------------------------------------------------------
# Hold-out forecast evaluation
# ---------------------------------------------------------------------------


class TestHoldout:
    def test_matches_manual_refit_and_iterated_forecast(self, bangladesh_panel):
        panel = bangladesh_panel
        lag, n_hold = 2, 4
        hold = holdout_forecast_eval(panel, lag, n_hold)

        y = panel.to_matrix()
        t = len(y)
        train = y[: t - n_hold]
        start = panel.variables[0].start_year
        from macrovar.series import AnnualSeries, CountryPanel

        train_panel = CountryPanel(
            country=panel.country,
            variables=tuple(
                AnnualSeries(
                    name=s.name,
                    country=s.country,
                    start_year=start,
                    values=tuple(s.values[: t - n_hold]),
                )
                for s in panel.variables
            ),
            ordering=panel.ordering,
        )
        est = estimate_var(train_panel, VarSpec(lag_order=lag))
        hist = [train[-2], train[-1]]
        preds = []
        for _ in range(n_hold):
            y_next = est.c + est.A[0] @ hist[-1] + est.A[1] @ hist[-2]
            preds.append(y_next)
            hist.append(y_next)
        err = y[t - n_hold :] - np.array(preds)
        for i, name in enumerate(panel.variable_names):
            assert hold.rmse[name] == pytest.approx(
                math.sqrt(np.mean(err[:, i] ** 2)), rel=1e-12
            )
            assert hold.mae[name] == pytest.approx(np.mean(np.abs(err[:, i])), rel=1e-12)

    def test_insufficient_observations(self, bangladesh_panel):
        with pytest.raises(DataError, match="insufficient observations.*hold-out"):
            holdout_forecast_eval(bangladesh_panel, lag_order=2, n_holdout=31)

    def test_bad_holdout_count(self, bangladesh_panel):
        with pytest.raises(DataError):
            holdout_forecast_eval(bangladesh_panel, lag_order=2, n_holdout=0)


# ---------------------------------------------------------------------------
# Determinism and concurrency
# ---------------------------------------------------------------------------


class TestDeterminism:
    def test_same_seed_reproduces_band_arrays(self):
        a = run_pipeline(make_config()).countries[0].irf_bands
        b = run_pipeline(make_config()).countries[0].irf_bands
        assert np.array_equal(a.lower, b.lower)
        assert np.array_equal(a.upper, b.upper)

    def test_different_seed_changes_bands(self):
        a = run_pipeline(make_config()).countries[0].irf_bands
        b = run_pipeline(make_config(seed=10)).countries[0].irf_bands
        assert not np.array_equal(a.lower, b.lower)

    def test_worker_count_does_not_change_results(self):
        cfg_seq = make_config(countries=("bangladesh", "india"))
        cfg_par = make_config(countries=("bangladesh", "india"), workers=4)
        seq = run_pipeline(cfg_seq)
        par = run_pipeline(cfg_par)
        for r_seq, r_par in zip(seq.countries, par.countries):
            assert r_seq.country == r_par.country
            assert np.array_equal(r_seq.var_estimate.A, r_par.var_estimate.A)
            assert np.array_equal(r_seq.irf_bands.lower, r_par.irf_bands.lower)
            assert np.array_equal(r_seq.irf_bands.upper, r_par.irf_bands.upper)
