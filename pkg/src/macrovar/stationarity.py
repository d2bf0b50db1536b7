"""Unit-root (ADF) and cointegration (Johansen) tests.

The ADF test regresses the first difference on a constant, the lagged level,
and lagged differences; the Johansen test runs the standard reduced-rank
regression for the intercept-no-trend case. Critical values and p-value
approximations come from :mod:`macrovar.critvals`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import critvals
from .errors import DataError, NumericError
from .series import AnnualSeries, CountryPanel

__all__ = [
    "AdfResult",
    "JohansenResult",
    "adf_test",
    "johansen_test",
    "JOHANSEN_CASES",
]

# Deterministic-term cases for the Johansen test; only the first (the case
# whose 5% critical values are embedded) is implemented.
JOHANSEN_CASES = ("intercept_no_trend", "no_intercept_no_trend", "intercept_trend")

_MIN_ADF_OBS = 10


@dataclass(frozen=True)
class AdfResult:
    """Augmented Dickey-Fuller test result (null: unit root).

    ``statistic`` is the t-ratio on the lagged level; ``critical_values``
    maps the 0.01/0.05/0.10 levels to finite-sample critical values;
    ``n_obs`` is the effective regression sample size.
    """

    series_name: str
    country: str
    statistic: float
    p_value: float
    critical_values: dict[float, float]
    lags_used: int
    deterministic: str
    n_obs: int

    @property
    def reject_at_5pct(self) -> bool:
        return self.p_value < 0.05

    @property
    def interpretation(self) -> str:
        if self.reject_at_5pct:
            return "Reject null hypothesis; series is stationary."
        return "Fail to reject null hypothesis; unit root present."


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Least squares with rank check. Returns (coefs, residuals, ssr)."""
    coefs, _, rank, _ = np.linalg.lstsq(x, y, rcond=None)
    if rank < x.shape[1]:
        raise NumericError("collinear regressors in Dickey-Fuller regression")
    resid = y - x @ coefs
    return coefs, resid, float(resid @ resid)


def _adf_design(y: np.ndarray, k: int, start: int) -> tuple[np.ndarray, np.ndarray]:
    """Design matrix and response for a lag-k ADF regression.

    Rows are difference indices ``start .. len(y)-2``; columns are
    [constant, lagged level, k lagged differences].
    """
    dy = np.diff(y)
    rows = np.arange(start, len(dy))
    cols = [np.ones(len(rows)), y[rows]]
    for j in range(1, k + 1):
        cols.append(dy[rows - j])
    return np.column_stack(cols), dy[rows]


def _default_max_lags(t: int) -> int:
    # Schwert rule: floor(12 * (T/100)^(1/4)).
    return int(math.floor(12.0 * (t / 100.0) ** 0.25))


def adf_test(
    series: AnnualSeries,
    max_lags: int | None = None,
    lag_rule: int | str = "info_criterion",
) -> AdfResult:
    """Augmented Dickey-Fuller unit-root test with a constant.

    Parameters
    ----------
    series : AnnualSeries
        Fully observed series.
    max_lags : int, optional
        Cap for the lag search; default ``floor(12 * (T/100)**0.25)``.
    lag_rule : int or "info_criterion"
        An integer fixes the number of lagged differences; the default
        searches 0..max_lags by Schwarz information criterion on a common
        sample and refits the winner on its full sample.

    Returns
    -------
    AdfResult

    Raises
    ------
    DataError
        Missing values or fewer than 10 usable observations.
    NumericError
        Collinear regressors or zero residual variance.
    """
    if not series.is_complete:
        raise DataError(
            f"series {series.name!r}: insufficient data, missing values present "
            "(interpolate first)"
        )
    y = series.to_array()
    t = len(y)
    n_diffs = t - 1

    if isinstance(lag_rule, int):
        if lag_rule < 0:
            raise ValueError(f"fixed lag must be >= 0, got {lag_rule}")
        k_hat = lag_rule
        if n_diffs - k_hat < max(_MIN_ADF_OBS, k_hat + 3):
            raise DataError(
                f"series {series.name!r}: insufficient data for ADF with "
                f"{k_hat} lags ({n_diffs - k_hat} usable observations)"
            )
    elif lag_rule == "info_criterion":
        cap = _default_max_lags(t) if max_lags is None else int(max_lags)
        if cap < 0:
            raise ValueError(f"max_lags must be >= 0, got {max_lags}")
        while cap > 0 and n_diffs - cap < max(_MIN_ADF_OBS, cap + 3):
            cap -= 1
        if n_diffs - cap < _MIN_ADF_OBS:
            raise DataError(
                f"series {series.name!r}: insufficient data for ADF "
                f"({n_diffs} differenced observations)"
            )
        # Compare candidates on the common sample that supports the largest
        # lag. Candidate lags whose design matrix is collinear are skipped;
        # only an infeasible lag 0 aborts the search.
        n_common = n_diffs - cap
        best_k, best_sic = None, math.inf
        for k in range(cap + 1):
            x, d = _adf_design(y, k, start=cap)
            try:
                _, _, ssr = _ols(x, d)
            except NumericError:
                continue
            if ssr <= 0.0 or ssr < 1e-24 * max(float(d @ d), 1.0):
                # Deterministic fit: the smallest such lag wins outright.
                best_k = k
                break
            sic = n_common * math.log(ssr / n_common) + (k + 2) * math.log(n_common)
            if sic < best_sic:
                best_k, best_sic = k, sic
        if best_k is None:
            raise NumericError(
                f"series {series.name!r}: collinear regressors in Dickey-Fuller "
                "regression at every candidate lag"
            )
        k_hat = best_k
    else:
        raise ValueError(f"unknown lag_rule {lag_rule!r}")

    # Refit the chosen lag on its full available sample.
    x, d = _adf_design(y, k_hat, start=k_hat)
    n_obs = len(d)
    n_params = x.shape[1]
    coefs, resid, ssr = _ols(x, d)
    dof = n_obs - n_params
    if dof <= 0:
        raise DataError(
            f"series {series.name!r}: insufficient data ({n_obs} observations, "
            f"{n_params} parameters)"
        )
    scale = ssr / max(float(d @ d), 1.0)
    if ssr <= 0.0 or scale < 1e-24:
        raise NumericError(
            f"series {series.name!r}: degenerate regression (zero residual variance)"
        )
    xtx_inv = np.linalg.inv(x.T @ x)
    se_gamma = math.sqrt(ssr / dof * xtx_inv[1, 1])
    stat = float(coefs[1] / se_gamma)

    return AdfResult(
        series_name=series.name,
        country=series.country,
        statistic=stat,
        p_value=critvals.adf_pvalue(stat, n_obs),
        critical_values=critvals.adf_critical_values(n_obs),
        lags_used=k_hat,
        deterministic="constant",
        n_obs=n_obs,
    )


@dataclass(frozen=True)
class JohansenResult:
    """Johansen cointegration-rank test result.

    Lists are indexed by the rank hypothesis r = 0..K-1 ("None",
    "At most 1", ...). p-values come from a gamma approximation to the
    asymptotic null distribution and are approximate.
    """

    country: str
    variable_names: tuple[str, ...]
    eigenvalues: tuple[float, ...]
    trace_stats: tuple[float, ...]
    max_eigen_stats: tuple[float, ...]
    trace_cv_5pct: tuple[float, ...]
    max_eigen_cv_5pct: tuple[float, ...]
    p_values_trace: tuple[float, ...]
    p_values_max: tuple[float, ...]
    rank_decision: int
    lags_in_differences: int
    deterministic: str
    t_effective: int

    @property
    def hypotheses(self) -> tuple[str, ...]:
        return tuple(
            "None" if r == 0 else f"At most {r}" for r in range(len(self.trace_stats))
        )

    @property
    def interpretation(self) -> str:
        if self.rank_decision == 0:
            return "No cointegration at the 5% level."
        return (
            f"{self.rank_decision} cointegrating relation(s) at the 5% level "
            "(trace test)."
        )


def johansen_test(
    panel: CountryPanel,
    lags_in_differences: int = 1,
    deterministic: str = "intercept_no_trend",
) -> JohansenResult:
    """Johansen trace / max-eigenvalue cointegration test.

    Runs the reduced-rank regression of Δy_t and y_{t-1} on an intercept and
    ``lags_in_differences`` lagged differences, solves the generalized
    eigenproblem via Cholesky whitening, and compares each rank hypothesis
    against the embedded 5% critical values.

    Raises
    ------
    DataError
        Missing values or too few observations.
    NumericError
        Collinear regressors (singular moment matrix) or K > 12.
    NotImplementedError
        Deterministic cases other than "intercept_no_trend".
    """
    if deterministic not in JOHANSEN_CASES:
        raise ValueError(f"unknown deterministic case {deterministic!r}")
    if deterministic != "intercept_no_trend":
        raise NotImplementedError(
            f"deterministic case {deterministic!r} is not implemented; "
            "only 'intercept_no_trend' is supported"
        )
    if lags_in_differences < 1:
        raise ValueError(
            f"lags_in_differences must be >= 1, got {lags_in_differences}"
        )
    if not panel.is_complete:
        raise DataError(
            f"panel for {panel.country}: insufficient data, missing values present"
        )
    k_vars = panel.n_variables
    if k_vars > 12:
        raise NumericError(
            f"critical values unavailable for {k_vars} variables (max 12)"
        )

    y = panel.to_matrix()
    t = len(y)
    k = lags_in_differences
    dy = np.diff(y, axis=0)
    rows = np.arange(k, len(dy))  # difference indices in the sample
    t_eff = len(rows)
    n_regr = 1 + k_vars * k
    if t_eff <= n_regr + k_vars:
        raise DataError(
            f"panel for {panel.country}: insufficient data for Johansen test "
            f"({t_eff} effective observations)"
        )

    z = np.column_stack(
        [np.ones(t_eff)] + [dy[rows - j] for j in range(1, k + 1)]
    )
    z0 = dy[rows]  # Δy_t
    z1 = y[rows]  # y_{t-1}

    # Residualize Δy_t and y_{t-1} on the short-run dynamics.
    coef0, _, rank0, _ = np.linalg.lstsq(z, z0, rcond=None)
    coef1, _, rank1, _ = np.linalg.lstsq(z, z1, rcond=None)
    if rank0 < z.shape[1] or rank1 < z.shape[1]:
        raise NumericError(f"collinear regressors in Johansen test for {panel.country}")
    r0 = z0 - z @ coef0
    r1 = z1 - z @ coef1

    s00 = r0.T @ r0 / t_eff
    s01 = r0.T @ r1 / t_eff
    s11 = r1.T @ r1 / t_eff

    try:
        l11 = np.linalg.cholesky(s11)
        s00_inv_s01 = np.linalg.solve(s00, s01)
    except np.linalg.LinAlgError:
        raise NumericError(
            f"collinear regressors in Johansen test for {panel.country} "
            "(singular moment matrix)"
        ) from None
    # Whitened symmetric eigenproblem for |λ S11 - S10 S00^-1 S01| = 0.
    inner = np.linalg.solve(l11, (s01.T @ s00_inv_s01) @ np.linalg.inv(l11).T)
    inner = (inner + inner.T) / 2.0
    eigvals = np.linalg.eigvalsh(inner)[::-1]
    eigvals = np.clip(eigvals, 0.0, 1.0 - 1e-15)

    log_terms = np.log(1.0 - eigvals)
    trace_stats = tuple(float(-t_eff * log_terms[r:].sum()) for r in range(k_vars))
    max_stats = tuple(float(-t_eff * log_terms[r]) for r in range(k_vars))
    trace_cv = tuple(
        critvals.johansen_critical_value("trace", k_vars - r) for r in range(k_vars)
    )
    max_cv = tuple(
        critvals.johansen_critical_value("maxeig", k_vars - r) for r in range(k_vars)
    )
    p_trace = tuple(
        critvals.johansen_pvalue("trace", trace_stats[r], k_vars - r)
        for r in range(k_vars)
    )
    p_max = tuple(
        critvals.johansen_pvalue("maxeig", max_stats[r], k_vars - r)
        for r in range(k_vars)
    )

    rank_decision = k_vars
    for r in range(k_vars):
        if trace_stats[r] < trace_cv[r]:
            rank_decision = r
            break

    return JohansenResult(
        country=panel.country,
        variable_names=panel.variable_names,
        eigenvalues=tuple(float(v) for v in eigvals),
        trace_stats=trace_stats,
        max_eigen_stats=max_stats,
        trace_cv_5pct=trace_cv,
        max_eigen_cv_5pct=max_cv,
        p_values_trace=p_trace,
        p_values_max=p_max,
        rank_decision=rank_decision,
        lags_in_differences=k,
        deterministic=deterministic,
        t_effective=t_eff,
    )
