"""Structural analysis of a fitted VAR: Cholesky-orthogonalized impulse
responses, forecast-error variance decomposition, and historical
decomposition, plus parametric Monte Carlo confidence bands for the IRFs.

Identification is recursive: the residual covariance (small-sample form) is
factored as Sigma = P P' with P lower-triangular in the chosen variable
ordering. Reduced-form moving-average matrices follow the recursion
Psi_0 = I, Psi_h = sum_{i<=min(h,p)} A_i Psi_{h-i}; orthogonalized responses
are irf_h = Psi_h P.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .varmodel import VarEstimate, companion_matrix

__all__ = [
    "StructuralSet",
    "IrfBands",
    "structural_analysis",
    "impulse_responses",
    "variance_decomposition",
    "historical_decomposition",
    "irf_confidence_bands",
]


@dataclass(frozen=True)
class StructuralSet:
    """Structural quantities derived from one fitted VAR.

    ``irf[h, i, j]`` is the horizon-h response of variable i to a one-
    standard-deviation orthogonalized shock in variable j (original column
    indices; ``ordering`` records the recursive identification order).
    ``fevd[i, h, j]`` is the percent share of shock j in variable i's
    (h+1)-step forecast-error variance; ``fevd_se[i, h]`` the corresponding
    forecast standard error. Historical paths cover the estimation sample:
    ``hist_baseline + hist_contributions.sum(axis=0) == hist_actual``.
    """

    variable_names: tuple[str, ...]
    ordering: tuple[str, ...]
    chol_p: np.ndarray
    ma_coeffs: np.ndarray  # (H+1, K, K)
    irf: np.ndarray  # (H+1, K, K)
    fevd: np.ndarray  # (K, H, K)
    fevd_se: np.ndarray  # (K, H)
    hist_actual: np.ndarray  # (T_eff, K)
    hist_baseline: np.ndarray  # (T_eff, K)
    hist_contributions: np.ndarray  # (K shocks, T_eff, K variables)
    hist_start_year: int

    @property
    def horizon(self) -> int:
        return self.irf.shape[0] - 1


def _cholesky_factor(est: VarEstimate, ordering: tuple[str, ...]) -> np.ndarray:
    """Sigma = P P' with P lower-triangular in ``ordering``, returned with
    rows/columns in the estimate's original variable positions."""
    names = est.variable_names
    if sorted(ordering) != sorted(names):
        raise ValueError(f"ordering {ordering} is not a permutation of {names}")
    perm = [names.index(v) for v in ordering]
    sigma_p = est.sigma_u[np.ix_(perm, perm)]
    try:
        low = np.linalg.cholesky(sigma_p)
    except np.linalg.LinAlgError:
        raise NumericError(
            "Cholesky failed: residual covariance not positive definite"
        ) from None
    k = len(names)
    e = np.zeros((k, k))
    e[perm, np.arange(k)] = 1.0
    return e @ low @ e.T


def _ma_coefficients(a_mats: tuple[np.ndarray, ...], horizon: int) -> np.ndarray:
    k = a_mats[0].shape[0]
    p = len(a_mats)
    psi = np.zeros((horizon + 1, k, k))
    psi[0] = np.eye(k)
    for h in range(1, horizon + 1):
        acc = np.zeros((k, k))
        for i in range(1, min(h, p) + 1):
            acc += a_mats[i - 1] @ psi[h - i]
        psi[h] = acc
    return psi


def _check_stability(est: VarEstimate) -> None:
    moduli = np.abs(np.linalg.eigvals(companion_matrix(est.A)))
    if moduli.max() >= 1.0:
        warnings.warn(
            f"VAR is not stable (max root modulus {moduli.max():.6f}); "
            "impulse responses may diverge",
            RuntimeWarning,
            stacklevel=3,
        )


def structural_analysis(
    est: VarEstimate,
    horizon: int = 10,
    ordering: tuple[str, ...] | None = None,
) -> StructuralSet:
    """Compute IRFs, FEVD, and historical decomposition in one pass."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    ordering = tuple(ordering) if ordering is not None else est.variable_names
    _check_stability(est)
    p_chol = _cholesky_factor(est, ordering)
    k = est.n_variables
    t_eff = est.t_effective

    # IRFs and FEVD on the requested horizon.
    psi = _ma_coefficients(est.A, horizon)
    irf = psi @ p_chol
    sq = irf**2  # (H+1, K, K)
    cum = np.cumsum(sq, axis=0)  # sum over s = 0..h
    mse = cum.sum(axis=2)  # (H+1, K): total forecast-error variance
    fevd = np.empty((k, horizon, k))
    fevd_se = np.empty((k, horizon))
    for h in range(1, horizon + 1):
        fevd[:, h - 1, :] = 100.0 * cum[h - 1] / mse[h - 1][:, None]
        fevd_se[:, h - 1] = np.sqrt(mse[h - 1])

    # Historical decomposition over the estimation sample.
    psi_full = psi if t_eff - 1 <= horizon else _ma_coefficients(est.A, t_eff - 1)
    irf_full = psi_full @ p_chol  # (>=T_eff, K, K)
    shocks = np.linalg.solve(p_chol, est.residuals.T).T  # (T_eff, K) structural
    # contribution of shock j to variable i at t: sum_s irf_s[i, j] * w_j,t-s
    contrib = np.zeros((k, t_eff, k))
    for j in range(k):
        for i in range(k):
            contrib[j, :, i] = np.convolve(irf_full[:t_eff, i, j], shocks[:, j])[:t_eff]
    actual = est.y[est.lag_order :]
    baseline = _deterministic_path(est)
    return StructuralSet(
        variable_names=est.variable_names,
        ordering=ordering,
        chol_p=p_chol,
        ma_coeffs=psi,
        irf=irf,
        fevd=fevd,
        fevd_se=fevd_se,
        hist_actual=actual,
        hist_baseline=baseline,
        hist_contributions=contrib,
        hist_start_year=est.start_year + est.lag_order,
    )


def _deterministic_path(est: VarEstimate) -> np.ndarray:
    """Shock-free forecast from the presample values and the intercept."""
    p = est.lag_order
    k = est.n_variables
    t_eff = est.t_effective
    hist = est.y[:p].copy()  # rows [y_0 .. y_{p-1}]
    out = np.empty((t_eff, k))
    for t in range(t_eff):
        y_t = est.c.copy()
        for lag in range(1, p + 1):
            y_t += est.A[lag - 1] @ hist[p - lag]
        out[t] = y_t
        hist = np.vstack([hist[1:], y_t]) if p > 1 else y_t[None, :]
    return out


def impulse_responses(
    est: VarEstimate,
    horizon: int = 10,
    ordering: tuple[str, ...] | None = None,
) -> StructuralSet:
    """Orthogonalized impulse responses (irf part of the StructuralSet)."""
    return structural_analysis(est, horizon, ordering)


def variance_decomposition(
    est: VarEstimate,
    horizon: int = 10,
    ordering: tuple[str, ...] | None = None,
) -> StructuralSet:
    """Forecast-error variance decomposition (fevd part), with forecast SEs."""
    return structural_analysis(est, horizon, ordering)


def historical_decomposition(
    est: VarEstimate,
    ordering: tuple[str, ...] | None = None,
) -> StructuralSet:
    """Baseline + per-shock contribution paths (hist part)."""
    return structural_analysis(est, horizon=10, ordering=ordering)


@dataclass(frozen=True)
class IrfBands:
    """Parametric Monte Carlo IRF percentile bands.

    Coefficients are re-drawn from their asymptotic normal distribution
    (n_draws times, fixed covariance factor), responses recomputed, and the
    pointwise lower/upper percentiles taken. Method label: parametric
    Monte Carlo, coefficient uncertainty only.
    """

    lower: np.ndarray  # (H+1, K, K)
    upper: np.ndarray  # (H+1, K, K)
    level: float
    n_draws: int


def _psd_factor(cov: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh((cov + cov.T) / 2.0)
        vals = np.clip(vals, 0.0, None)
        return vecs * np.sqrt(vals)[None, :]


def irf_confidence_bands(
    est: VarEstimate,
    horizon: int = 10,
    ordering: tuple[str, ...] | None = None,
    n_draws: int = 1000,
    rng: np.random.Generator | None = None,
    level: float = 0.95,
) -> IrfBands:
    """Pointwise IRF confidence bands by parametric Monte Carlo.

    Draws coefficient vectors from N(vec(B_hat), coef_cov) (equation-major),
    recomputes the orthogonalized IRF for each draw with the Cholesky factor
    held at its point estimate, and returns the (1-level)/2 and
    1-(1-level)/2 percentiles. Deterministic for a fixed ``rng`` state.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    if n_draws < 2:
        raise ValueError(f"n_draws must be >= 2, got {n_draws}")
    ordering = tuple(ordering) if ordering is not None else est.variable_names
    rng = rng if rng is not None else np.random.default_rng(0)
    p_chol = _cholesky_factor(est, ordering)
    k = est.n_variables
    m = est.n_regressors
    p = est.lag_order
    offset = 1 if est.include_constant else 0

    mean_vec = est.coefficient_matrix.T.reshape(-1)  # equation-major
    factor = _psd_factor(est.coef_cov)
    draws = np.empty((n_draws, horizon + 1, k, k))
    for d in range(n_draws):
        vec = mean_vec + factor @ rng.standard_normal(k * m)
        coefs = vec.reshape(k, m).T  # (m, K)
        a_mats = tuple(
            coefs[offset + lag * k : offset + (lag + 1) * k].T for lag in range(p)
        )
        draws[d] = _ma_coefficients(a_mats, horizon) @ p_chol
    alpha = 100.0 * (1.0 - level) / 2.0
    lower = np.percentile(draws, alpha, axis=0)
    upper = np.percentile(draws, 100.0 - alpha, axis=0)
    return IrfBands(lower=lower, upper=upper, level=level, n_draws=n_draws)
