"""Acceptance criteria for the toolkit, one test per criterion.

Each test prints (and registers for the terminal summary) a single PASS or
FAIL line. Oracle constants are frozen: they were derived once, by hand or
by an independent reference computation, and the tests must reproduce them
at the stated tolerances.
"""

from __future__ import annotations

import functools
import os
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import chi2, kstest

from conftest import (
    REF_A1,
    REF_A2,
    REF_INTERCEPT,
    REF_NAMES,
    REF_SHOCK_SD,
    SYNTHETIC_DIR,
    make_panel,
    simulate_stable_var,
)
from macrovar.critvals import (
    adf_critical_values,
    johansen_critical_value,
)
from macrovar.diagnostics import (
    granger_wald,
    residual_cross_correlations,
    serial_correlation_lm,
)
from macrovar.pipeline import PipelineConfig, run_pipeline
from macrovar.report import render_report
from macrovar.series import AnnualSeries
from macrovar.stationarity import adf_test, johansen_test
from macrovar.structural import structural_analysis
from macrovar.varmodel import (
    VarEstimate,
    VarSpec,
    companion_matrix,
    estimate_var,
    simulate_var,
)

ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


def criterion(label: str):
    """Record one PASS/FAIL line per acceptance criterion."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                ACCEPTANCE_RESULTS.append((label, False))
                print(f"FAIL  {label}")
                raise
            ACCEPTANCE_RESULTS.append((label, True))
            print(f"PASS  {label}")

        return wrapper

    return deco


def _series(values: np.ndarray, name: str = "v1") -> AnnualSeries:
    return AnnualSeries(name, "mc", 2000, tuple(float(v) for v in values))


# --------------------------------------------------------------------------
# Criterion 1: embedded critical values.
# --------------------------------------------------------------------------


@criterion("criterion 1: unit-root and cointegration critical values")
def test_criterion_1_critical_values():
    cvs = adf_critical_values(34)
    assert abs(cvs[0.01] - (-3.6394)) < 5e-5
    assert abs(cvs[0.05] - (-2.9511)) < 5e-5
    assert abs(cvs[0.10] - (-2.6143)) < 5e-5

    # Trace statistic 5% critical values for 3, 2, 1 common trends.
    assert abs(johansen_critical_value("trace", 3) - 29.797) < 5e-4
    assert abs(johansen_critical_value("trace", 2) - 15.495) < 5e-4
    assert abs(johansen_critical_value("trace", 1) - 3.841) < 5e-4
    # Maximum-eigenvalue statistic.
    assert abs(johansen_critical_value("maxeig", 3) - 21.132) < 5e-4
    assert abs(johansen_critical_value("maxeig", 2) - 14.265) < 5e-4
    assert abs(johansen_critical_value("maxeig", 1) - 3.841) < 5e-4


# --------------------------------------------------------------------------
# Criterion 2: trace/max-eigenvalue telescoping identity.
# --------------------------------------------------------------------------


@criterion("criterion 2: cointegration statistic telescoping identity")
def test_criterion_2_telescoping():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        k = int(rng.integers(2, 5))
        t_obs = int(rng.integers(50, 121))
        # Mix of random walks (with drift) and stationary noise columns.
        steps = rng.standard_normal((t_obs, k))
        walks = np.cumsum(steps + rng.normal(scale=0.5, size=k), axis=0)
        noise = rng.standard_normal((t_obs, k))
        mix = rng.random(k) < 0.5
        y = np.where(mix[None, :], walks, walks * 0.05 + noise)
        result = johansen_test(make_panel(y), lags_in_differences=1)
        trace = np.asarray(result.trace_stats)
        maxeig = np.asarray(result.max_eigen_stats)
        # trace(r) - maxeig(r) == trace(r+1); trace(K-1) == maxeig(K-1).
        resid = trace[:-1] - maxeig[:-1] - trace[1:]
        worst = max(worst, float(np.abs(resid).max()), abs(trace[-1] - maxeig[-1]))
    assert worst <= 1e-10, f"telescoping identity violated by {worst:.2e}"


# --------------------------------------------------------------------------
# Criterion 3: exact recovery from a noiseless VAR(2).
# --------------------------------------------------------------------------


@criterion("criterion 3: noiseless VAR(2) coefficient recovery")
def test_criterion_3_noiseless_recovery():
    # Oscillatory, slowly decaying system so the regressors stay well
    # conditioned over the sample.
    a1 = np.array([[0.5, -0.45, 0.10], [0.35, 0.40, -0.30], [0.10, 0.25, 0.30]])
    a2 = np.array([[0.25, 0.10, 0.00], [-0.10, 0.15, 0.10], [0.05, -0.10, 0.20]])
    c = np.array([1.0, 0.5, -0.2])
    assert np.abs(np.linalg.eigvals(companion_matrix([a1, a2]))).max() < 1.0

    rng = np.random.default_rng(3)
    init = rng.normal(scale=5.0, size=(2, 3))
    y = simulate_var([a1, a2], c, np.zeros((3, 3)), 40, rng, initial=init)
    est = estimate_var(make_panel(y), VarSpec(lag_order=2))

    assert np.abs(est.A[0] - a1).max() < 1e-8
    assert np.abs(est.A[1] - a2).max() < 1e-8
    assert np.abs(est.c - c).max() < 1e-8
    for eq in est.per_equation:
        assert eq.r_squared == 1.0


# --------------------------------------------------------------------------
# Criterion 4: simulation recovery of the reference system.
# --------------------------------------------------------------------------


@criterion("criterion 4: large-sample recovery of the reference VAR(2)")
def test_criterion_4_simulation_recovery():
    start = time.perf_counter()
    true_max_modulus = 0.997648  # frozen oracle for the reference system
    comp = companion_matrix([REF_A1, REF_A2])
    assert abs(np.abs(np.linalg.eigvals(comp)).max() - true_max_modulus) < 0.02

    rng = np.random.default_rng(0)
    sigma = np.diag(REF_SHOCK_SD**2)
    y = simulate_var([REF_A1, REF_A2], REF_INTERCEPT, sigma, 10_000, rng)
    est = estimate_var(make_panel(y, names=REF_NAMES), VarSpec(lag_order=2))

    truth = np.vstack([REF_INTERCEPT[None, :], REF_A1.T, REF_A2.T])  # (m, K)
    for i, eq in enumerate(est.per_equation):
        for j, row in enumerate(eq.coef_table):
            dev = abs(row.coefficient - truth[j, i])
            assert dev <= 4.0 * row.std_error, (
                f"{eq.dependent} / {row.name}: |dev| {dev:.3e} "
                f"> 4 SE {4 * row.std_error:.3e}"
            )

    est_max = np.abs(np.linalg.eigvals(companion_matrix(est.A))).max()
    assert abs(est_max - true_max_modulus) < 0.02
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"took {elapsed:.1f}s"


# --------------------------------------------------------------------------
# Criterion 5: Monte Carlo size / p-value calibration.
# --------------------------------------------------------------------------


@criterion("criterion 5: finite-sample size and p-value calibration")
def test_criterion_5_monte_carlo_calibration():
    start = time.perf_counter()

    # ADF: 5% rejection rate on driftless Gaussian random walks.
    rng = np.random.default_rng(2024)
    rejections = 0
    for _ in range(2000):
        walk = np.cumsum(rng.standard_normal(200))
        rejections += adf_test(_series(walk)).p_value < 0.05
    adf_size = rejections / 2000
    assert abs(adf_size - 0.05) <= 0.02, f"ADF size {adf_size:.4f}"

    # Cointegration trace test, "None" null, on independent random walks
    # with drift (the intercept-no-trend tables assume the drift-dominated
    # limiting case; driftless walks follow a different distribution).
    rng = np.random.default_rng(77)
    rejections = 0
    for _ in range(1000):
        steps = 0.5 + rng.standard_normal((500, 3))
        y = np.cumsum(steps, axis=0)
        result = johansen_test(make_panel(y), lags_in_differences=1)
        rejections += result.trace_stats[0] > result.trace_cv_5pct[0]
    joh_size = rejections / 1000
    assert abs(joh_size - 0.05) <= 0.02, f"trace-test size {joh_size:.4f}"

    # Serial-correlation LM p-values approximately uniform under the null.
    rng = np.random.default_rng(5)
    a1 = np.array([[0.5, 0.1], [0.0, 0.3]])
    pvals = []
    for _ in range(500):
        shocks = rng.standard_normal((200, 2))
        y = np.zeros((200, 2))
        for t in range(1, 200):
            y[t] = a1 @ y[t - 1] + shocks[t]
        est = estimate_var(make_panel(y), VarSpec(lag_order=1))
        pvals.append(serial_correlation_lm(est, max_lag=1).row(1, "at_lag").p_lre)
    ks = kstest(pvals, "uniform").statistic
    assert ks < 0.08, f"LM p-value KS distance {ks:.4f}"

    elapsed = time.perf_counter() - start
    assert elapsed < 300.0, f"took {elapsed:.1f}s"


# --------------------------------------------------------------------------
# Criterion 6: structural identities on random stable systems.
# --------------------------------------------------------------------------


@criterion("criterion 6: FEVD, historical-decomposition, and IRF identities")
def test_criterion_6_structural_identities():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        k = int(rng.integers(2, 4))
        p = int(rng.integers(1, 3))
        y, _ = simulate_stable_var(rng, k, p, t_obs=60)
        names = tuple(f"v{j + 1}" for j in range(k))
        order = tuple(rng.permutation(names))
        est = estimate_var(make_panel(y, names=names), VarSpec(lag_order=p))
        s = structural_analysis(est, horizon=8, ordering=order)

        # FEVD rows sum to 100 at every horizon.
        sums = s.fevd.sum(axis=2)
        assert np.abs(sums - 100.0).max() <= 1e-6

        # Impact responses equal the Cholesky factor exactly.
        assert np.array_equal(s.irf[0], s.chol_p)

        # First-ordered variable: 100% own-shock share at horizon 1.
        i0 = names.index(order[0])
        assert abs(s.fevd[i0, 0, i0] - 100.0) < 1e-9

        # Historical decomposition adds up: actual = baseline + contributions.
        recon = s.hist_baseline + s.hist_contributions.sum(axis=0)
        rel = np.abs(recon - s.hist_actual) / (np.abs(s.hist_actual) + 1.0)
        assert rel.max() < 1e-8


# --------------------------------------------------------------------------
# Criterion 7: closed-form scalar impulse responses.
# --------------------------------------------------------------------------


@criterion("criterion 7: scalar AR(1) impulse responses in closed form")
def test_criterion_7_scalar_irf():
    # K = 1, A = 0.5, sigma^2 = 4: orthogonalized IRF is 2 * 0.5^h exactly.
    rng = np.random.default_rng(1)
    y = simulate_var([np.array([[0.5]])], np.zeros(1), np.array([[4.0]]), 50, rng)
    t_eff = len(y) - 1
    resid = y[1:] - 0.5 * y[:-1]
    est = VarEstimate(
        variable_names=("y",),
        lag_order=1,
        include_constant=True,
        A=(np.array([[0.5]]),),
        c=np.zeros(1),
        residuals=resid,
        fitted=y[1:] - resid,
        sigma_u_ml=np.array([[4.0]]),
        sigma_u=np.array([[4.0]]),
        per_equation=(),
        coef_cov=np.zeros((2, 2)),
        t_effective=t_eff,
        n_regressors=2,
        y=y,
        start_year=2000,
    )
    s = structural_analysis(est, horizon=6)
    expected = np.array([2.0 * 0.5**h for h in range(7)])
    assert np.array_equal(s.irf[:, 0, 0], expected)


# --------------------------------------------------------------------------
# Criterion 8: agreement with directly coded textbook formulas.
# --------------------------------------------------------------------------


@criterion("criterion 8: Wald, cross-correlation, and LM cross-checks")
def test_criterion_8_direct_formula_crosschecks():
    # -- Granger Wald vs. explicit restriction-matrix formula (K=2, p=1). --
    rng = np.random.default_rng(60)
    a1 = np.array([[0.5, 0.2], [-0.1, 0.4]])
    y = simulate_var([a1], np.array([0.3, -0.2]), np.eye(2), 60, rng, burn_in=20)
    est = estimate_var(make_panel(y), VarSpec(lag_order=1))

    k, p, m = 2, 1, est.n_regressors
    beta = est.coefficient_matrix.T.reshape(-1)  # equation-major stacking
    wald_rows = {
        (r.dependent, r.excluded): r for r in granger_wald(est)
    }
    for i, dep in enumerate(est.variable_names):
        for j, exc in enumerate(est.variable_names):
            if i == j:
                continue
            rows = []
            for lag in range(p):
                sel = np.zeros(k * m)
                sel[i * m + 1 + lag * k + j] = 1.0
                rows.append(sel)
            r_mat = np.vstack(rows)
            rb = r_mat @ beta
            w_direct = float(
                rb @ np.linalg.solve(r_mat @ est.coef_cov @ r_mat.T, rb)
            )
            w_mod = wald_rows[(dep, exc)].chi_sq
            assert abs(w_mod - w_direct) <= 1e-8 * max(1.0, abs(w_direct))
            assert abs(
                wald_rows[(dep, exc)].p_value - chi2.sf(w_direct, p)
            ) < 1e-12

    # -- Residual cross-correlations vs. direct moment formula. --
    cc = residual_cross_correlations(est, max_lag=3)
    u = est.residuals
    t_eff = len(u)
    v = u - u.mean(axis=0)
    sd = np.sqrt((v**2).sum(axis=0) / t_eff)
    for lag, mat in enumerate(cc.matrices):
        direct = (v[lag:].T @ v[: t_eff - lag] / t_eff) / np.outer(sd, sd)
        assert np.abs(mat - direct).max() <= 1e-12

    # -- LM statistic vs. explicit two-fit likelihood-ratio computation. --
    lm = serial_correlation_lm(est, max_lag=2)
    x = np.hstack([np.ones((t_eff, 1)), y[:-1]])
    coefs_r, *_ = np.linalg.lstsq(x, u, rcond=None)
    resid_r = u - x @ coefs_r
    sigma_r = resid_r.T @ resid_r / t_eff
    for h, variant, lags in (
        (1, "at_lag", [1]),
        (2, "at_lag", [2]),
        (2, "up_to_lag", [1, 2]),
    ):
        lagged = np.zeros((t_eff, 2 * len(lags)))
        for pos, lag in enumerate(lags):
            lagged[lag:, pos * 2 : (pos + 1) * 2] = u[: t_eff - lag]
        aux = np.hstack([x, lagged])
        coefs_a, *_ = np.linalg.lstsq(aux, u, rcond=None)
        resid_a = u - aux @ coefs_a
        sigma_a = resid_a.T @ resid_a / t_eff
        g = 2 * len(lags)
        n_star = t_eff - est.n_regressors - g - (2 - g + 1) / 2.0
        lre_direct = -n_star * (
            np.linalg.slogdet(sigma_a)[1] - np.linalg.slogdet(sigma_r)[1]
        )
        lre_mod = lm.row(h, variant).lre_stat
        assert abs(lre_mod - lre_direct) <= 1e-8 * max(1.0, abs(lre_direct))


# --------------------------------------------------------------------------
# Criterion 9: advisory replication on user-supplied data.
# --------------------------------------------------------------------------


def test_criterion_9_user_data_replication():
    label = "criterion 9: replication on user-supplied data (advisory)"
    data_dir = os.environ.get("MACROVAR_DATA")
    if not data_dir:
        ACCEPTANCE_RESULTS.append((f"{label} - no data supplied, skipped", True))
        print(f"PASS  {label} - no data supplied, skipped")
        pytest.skip("set MACROVAR_DATA to a directory of country CSVs to run")
    config = PipelineConfig(
        countries=tuple(
            sorted(p.stem for p in Path(data_dir).glob("*.csv"))
        ),
        data_source="csv_dir",
        csv_dir=data_dir,
        seed=0,
        keep_going=True,
    )
    report = run_pipeline(config)
    for result in report.countries:
        for adf in result.adf_levels or ():
            print(
                f"  [advisory] {result.country} ADF {adf.series_name}: "
                f"stat {adf.statistic:.4f}, p {adf.p_value:.4f}"
            )
        if result.johansen is not None:
            print(
                f"  [advisory] {result.country} cointegration rank: "
                f"{result.johansen.rank_decision}"
            )
    # Advisory only: differences from any external write-up are reported,
    # never asserted.
    ACCEPTANCE_RESULTS.append((label, True))
    print(f"PASS  {label}")


# --------------------------------------------------------------------------
# Criterion 10: deterministic, byte-identical reports.
# --------------------------------------------------------------------------


@criterion("criterion 10: byte-identical reports across runs and workers")
def test_criterion_10_deterministic_reports():
    base = PipelineConfig(
        countries=("bangladesh", "india", "pakistan"),
        data_source="csv_dir",
        csv_dir=str(SYNTHETIC_DIR),
        seed=42,
    )
    runs = [
        run_pipeline(base),
        run_pipeline(base),
        run_pipeline(PipelineConfig(**{**base.__dict__, "workers": 3})),
    ]
    rendered = [
        {
            fmt: render_report(r, output_format=fmt)
            for fmt in ("markdown", "json", "csv")
        }
        for r in runs
    ]
    for other in rendered[1:]:
        for fmt, docs in rendered[0].items():
            assert docs == other[fmt], f"{fmt} output differs between runs"

    # A different seed must change the stochastic outputs (IRF bands).
    alt = run_pipeline(PipelineConfig(**{**base.__dict__, "seed": 43}))
    assert render_report(alt, output_format="json") != rendered[0]["json"]
