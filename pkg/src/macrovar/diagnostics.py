"""Post-estimation diagnostics for a fitted VAR: Granger/block-exogeneity
Wald tests, companion stability roots, residual cross-correlations, and
multivariate serial-correlation LM tests (Edgeworth-corrected LR and Rao F).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2, f as f_dist

from .errors import DataError, NumericError
from .varmodel import VarEstimate, companion_matrix

__all__ = [
    "WaldBlockResult",
    "StabilityResult",
    "CrossCorrResult",
    "LmRow",
    "LmResult",
    "granger_wald",
    "stability_roots",
    "residual_cross_correlations",
    "serial_correlation_lm",
]


@dataclass(frozen=True)
class WaldBlockResult:
    """One Granger-causality / block-exogeneity Wald row."""

    dependent: str
    excluded: str
    chi_sq: float
    df: int
    p_value: float

    @property
    def significant_at_5pct(self) -> bool:
        return self.p_value < 0.05


def granger_wald(est: VarEstimate) -> tuple[WaldBlockResult, ...]:
    """Granger-causality Wald tests for every equation.

    For each equation i and each other variable j, tests that all p lag
    coefficients of j in equation i are zero: W = b' V^-1 b with V the
    corresponding sub-block of the small-sample coefficient covariance.
    An "All" row per equation tests every other variable's block jointly.

    Raises NumericError ("degenerate covariance") if a covariance sub-block
    is singular.
    """
    k = est.n_variables
    p = est.lag_order
    m = est.n_regressors
    offset = 1 if est.include_constant else 0
    coef = est.coefficient_matrix  # (m, K)

    results: list[WaldBlockResult] = []
    for i, dep in enumerate(est.variable_names):
        v_full = est.coef_cov[i * m : (i + 1) * m, i * m : (i + 1) * m]
        block_sets: list[tuple[str, list[int]]] = []
        all_idx: list[int] = []
        for j, name in enumerate(est.variable_names):
            if j == i:
                continue
            idx = [offset + lag * k + j for lag in range(p)]
            block_sets.append((name, idx))
            all_idx.extend(idx)
        block_sets.append(("All", all_idx))
        for name, idx in block_sets:
            b = coef[idx, i]
            v = v_full[np.ix_(idx, idx)]
            try:
                sol = np.linalg.solve(v, b)
            except np.linalg.LinAlgError:
                raise NumericError(
                    f"degenerate covariance in Wald test ({dep} / {name})"
                ) from None
            w = float(b @ sol)
            if not np.isfinite(w) or w < 0.0:
                raise NumericError(
                    f"degenerate covariance in Wald test ({dep} / {name})"
                )
            df = len(idx)
            results.append(
                WaldBlockResult(
                    dependent=dep,
                    excluded=name,
                    chi_sq=w,
                    df=df,
                    p_value=float(chi2.sf(w, df)),
                )
            )
    return tuple(results)


@dataclass(frozen=True)
class StabilityResult:
    """Companion-matrix eigenvalues sorted by modulus."""

    roots: tuple[complex, ...]
    moduli: tuple[float, ...]
    stable: bool

    @property
    def max_modulus(self) -> float:
        return self.moduli[0]

    @property
    def interpretation(self) -> str:
        if self.stable:
            return "All roots lie inside the unit circle; VAR satisfies the stability condition."
        return "At least one root is on or outside the unit circle; VAR is not stable."


def stability_roots(est: VarEstimate) -> StabilityResult:
    """Eigenvalues of the (K*p x K*p) companion matrix, moduli descending."""
    comp = companion_matrix(est.A)
    roots = np.linalg.eigvals(comp)
    order = np.argsort(-np.abs(roots))
    roots = roots[order]
    moduli = np.abs(roots)
    return StabilityResult(
        roots=tuple(complex(r) for r in roots),
        moduli=tuple(float(v) for v in moduli),
        stable=bool(moduli[0] < 1.0),
    )


@dataclass(frozen=True)
class CrossCorrResult:
    """Residual cross-correlation matrices by lag.

    ``matrices[l][i, j]`` = corr(u_i,t, u_j,t-l); ``band`` is the unadjusted
    asymptotic two-standard-error reference 1/sqrt(T_eff).
    """

    variable_names: tuple[str, ...]
    matrices: tuple[np.ndarray, ...]
    band: float
    t_effective: int


def residual_cross_correlations(est: VarEstimate, max_lag: int) -> CrossCorrResult:
    """Sample cross-correlations of the VAR residuals for lags 0..max_lag.

    Mean-centered, divisor T_eff at every lag; the lag-0 diagonal is exactly 1.
    """
    u = est.residuals
    t_eff = len(u)
    if max_lag < 0:
        raise ValueError(f"max_lag must be >= 0, got {max_lag}")
    if max_lag >= t_eff - 2:
        raise DataError(
            f"insufficient observations for cross-correlations at lag {max_lag} "
            f"(T_eff = {t_eff})"
        )
    v = u - u.mean(axis=0)
    sd = np.sqrt((v * v).sum(axis=0) / t_eff)
    if np.any(sd <= 0.0):
        bad = est.variable_names[int(np.argmin(sd))]
        raise NumericError(f"zero-variance residual column ({bad})")
    mats = []
    for lag in range(max_lag + 1):
        cov = v[lag:].T @ v[: t_eff - lag] / t_eff if lag else v.T @ v / t_eff
        mats.append(cov / np.outer(sd, sd))
    return CrossCorrResult(
        variable_names=est.variable_names,
        matrices=tuple(mats),
        band=1.0 / math.sqrt(t_eff),
        t_effective=t_eff,
    )


@dataclass(frozen=True)
class LmRow:
    """One serial-correlation LM row: Edgeworth-corrected LR + Rao F."""

    lag: int
    variant: str  # "at_lag" or "up_to_lag"
    lre_stat: float
    df: int
    p_lre: float
    rao_f: float
    df_pair: tuple[int, float]
    p_rao: float


@dataclass(frozen=True)
class LmResult:
    rows: tuple[LmRow, ...]

    def row(self, lag: int, variant: str) -> LmRow:
        for r in self.rows:
            if r.lag == lag and r.variant == variant:
                return r
        raise KeyError(f"no LM row for lag {lag}, variant {variant!r}")


def _lagged_residuals(u: np.ndarray, lags: list[int]) -> np.ndarray:
    """Stack residuals at the given lags, zero-filling the presample."""
    t, k = u.shape
    cols = np.zeros((t, k * len(lags)))
    for pos, lag in enumerate(lags):
        cols[lag:, pos * k : (pos + 1) * k] = u[: t - lag]
    return cols


def _lm_stat(
    u: np.ndarray, x: np.ndarray, sigma_restr: np.ndarray, m: int, lags: list[int]
) -> tuple[float, int, float, float, tuple[int, float], float]:
    """Edgeworth-corrected LR and Rao F for one auxiliary regression."""
    t_eff, k = u.shape
    g = k * len(lags)
    aux = np.hstack([x, _lagged_residuals(u, lags)])
    # Need at least k residual degrees of freedom for a nonsingular
    # auxiliary covariance.
    if t_eff < aux.shape[1] + k:
        raise DataError(
            f"insufficient observations for LM test at lags {lags} "
            f"({t_eff} rows, {aux.shape[1]} regressors)"
        )
    coefs, _, rank, _ = np.linalg.lstsq(aux, u, rcond=None)
    if rank < aux.shape[1]:
        raise NumericError(f"collinear regressors in LM auxiliary fit at lags {lags}")
    resid = u - aux @ coefs
    sigma_aux = resid.T @ resid / t_eff

    sign_a, logdet_a = np.linalg.slogdet(sigma_aux)
    sign_r, logdet_r = np.linalg.slogdet(sigma_restr)
    if sign_a <= 0 or sign_r <= 0:
        raise NumericError(f"degenerate covariance in LM test at lags {lags}")
    log_lambda = min(logdet_a - logdet_r, 0.0)  # Λ = |Σ_aux| / |Σ_restr| <= 1

    df1 = k * g
    num = k * k * g * g - 4.0
    den = k * k + g * g - 5.0
    s = math.sqrt(num / den) if num > 0.0 and den > 0.0 else 1.0
    n_star = t_eff - m - g - (k - g + 1) / 2.0
    lre = -n_star * log_lambda
    df2 = n_star * s - df1 / 2.0 + 1.0
    lam_root = math.exp(log_lambda / s)
    rao = (1.0 - lam_root) / lam_root * df2 / df1
    p_lre = float(chi2.sf(lre, df1))
    p_rao = float(f_dist.sf(rao, df1, df2)) if df2 > 0 else float("nan")
    return lre, df1, p_lre, rao, (df1, df2), p_rao


def serial_correlation_lm(est: VarEstimate, max_lag: int) -> LmResult:
    """Multivariate serial-correlation LM tests for lags 1..max_lag.

    For each h the auxiliary regression adds lagged residuals (presample
    zero-filled) to the original VAR regressors and compares residual
    covariances via the Edgeworth-corrected likelihood-ratio statistic and
    its Rao F transformation. Two variants per h: "at_lag" adds residual
    lag h only (null: no serial correlation at lag h); "up_to_lag" adds
    lags 1..h (null: none up to lag h).
    """
    if max_lag < 1:
        raise ValueError(f"max_lag must be >= 1, got {max_lag}")
    u = est.residuals
    x, _ = _design_from_estimate(est)
    sigma_restr = est.sigma_u_ml
    m = est.n_regressors
    rows: list[LmRow] = []
    for h in range(1, max_lag + 1):
        for variant, lags in (("at_lag", [h]), ("up_to_lag", list(range(1, h + 1)))):
            lre, df1, p_lre, rao, df_pair, p_rao = _lm_stat(
                u, x, sigma_restr, m, lags
            )
            rows.append(
                LmRow(
                    lag=h,
                    variant=variant,
                    lre_stat=lre,
                    df=df1,
                    p_lre=p_lre,
                    rao_f=rao,
                    df_pair=df_pair,
                    p_rao=p_rao,
                )
            )
    return LmResult(rows=tuple(rows))


def _design_from_estimate(est: VarEstimate) -> tuple[np.ndarray, np.ndarray]:
    """Rebuild the estimation design matrix from the stored sample."""
    y = est.y
    p = est.lag_order
    rows = np.arange(p, len(y))
    cols = [np.ones((len(rows), 1))] if est.include_constant else []
    cols.extend(y[rows - lag] for lag in range(1, p + 1))
    return np.hstack(cols), y[rows]
