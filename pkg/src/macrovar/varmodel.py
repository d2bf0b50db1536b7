"""VAR(p) estimation by equation-wise least squares, per-equation statistics,
lag-order selection, and simulation.

The model is y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + u_t. All equations
share the regressor matrix X = [1, y_{t-1}, ..., y_{t-p}], so the system is
estimated in one multivariate least-squares pass. Two residual-covariance
conventions are kept: the ML form (divisor T_eff) feeds likelihoods and
information criteria; the small-sample form (divisor T_eff - m) feeds
standard errors, Wald tests, and structural factorizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .errors import DataError, NumericError
from .series import CountryPanel

__all__ = [
    "VarSpec",
    "CoefficientRow",
    "EquationStats",
    "VarEstimate",
    "LagSelectionRow",
    "LagSelection",
    "estimate_var",
    "select_lag_order",
    "companion_matrix",
    "simulate_var",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class VarSpec:
    """Estimation request: lag order and deterministic term."""

    lag_order: int
    include_constant: bool = True

    def __post_init__(self) -> None:
        if self.lag_order < 1:
            raise ValueError(f"lag_order must be >= 1, got {self.lag_order}")


@dataclass(frozen=True)
class CoefficientRow:
    name: str
    coefficient: float
    std_error: float
    t_stat: float


@dataclass(frozen=True)
class EquationStats:
    """Per-equation OLS fit statistics."""

    dependent: str
    r_squared: float
    adj_r_squared: float
    ssr: float
    se_equation: float
    f_stat: float
    log_likelihood: float
    coef_table: tuple[CoefficientRow, ...]


@dataclass(frozen=True)
class VarEstimate:
    """Fitted VAR(p).

    ``A`` holds the p lag matrices (K x K each), ``c`` the intercept.
    ``coef_cov`` is the full (K*m x K*m) coefficient covariance,
    equation-major: the (i, i) m x m block is the covariance of equation i's
    coefficient vector ordered [const, lag-1 block, ..., lag-p block].
    ``y`` retains the estimation input (T x K) so structural decompositions
    can rebuild baselines from the presample.
    """

    variable_names: tuple[str, ...]
    lag_order: int
    include_constant: bool
    A: tuple[np.ndarray, ...]
    c: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    sigma_u_ml: np.ndarray
    sigma_u: np.ndarray
    per_equation: tuple[EquationStats, ...]
    coef_cov: np.ndarray
    t_effective: int
    n_regressors: int
    y: np.ndarray
    start_year: int

    @property
    def n_variables(self) -> int:
        return len(self.variable_names)

    @property
    def regressor_names(self) -> tuple[str, ...]:
        names = ["const"] if self.include_constant else []
        for lag in range(1, self.lag_order + 1):
            names.extend(f"{v}(-{lag})" for v in self.variable_names)
        return tuple(names)

    @property
    def coefficient_matrix(self) -> np.ndarray:
        """(m x K) stacked coefficients, column i = equation i."""
        blocks = [self.c[None, :]] if self.include_constant else []
        blocks.extend(a.T for a in self.A)
        return np.vstack(blocks)

    def log_likelihood(self) -> float:
        """System multivariate-normal log-likelihood at the ML covariance."""
        k = self.n_variables
        sign, logdet = np.linalg.slogdet(self.sigma_u_ml)
        if sign <= 0:
            raise NumericError("degenerate covariance: |sigma| <= 0")
        return -0.5 * self.t_effective * (k * (1.0 + _LOG_2PI) + logdet)


def _lag_design(
    y: np.ndarray, p: int, include_constant: bool, start: int
) -> tuple[np.ndarray, np.ndarray]:
    """Regressor matrix and response for a VAR(p) on rows start..T-1."""
    rows = np.arange(start, len(y))
    cols = [np.ones((len(rows), 1))] if include_constant else []
    cols.extend(y[rows - lag] for lag in range(1, p + 1))
    x = np.hstack(cols) if cols else np.empty((len(rows), 0))
    return x, y[rows]


def estimate_var(panel: CountryPanel, spec: VarSpec) -> VarEstimate:
    """Estimate a VAR(p) by ordinary least squares.

    Raises
    ------
    DataError
        Missing values, or T_eff <= m (message "insufficient observations").
    NumericError
        Rank-deficient regressor matrix ("collinear regressors").
    """
    if not panel.is_complete:
        raise DataError(
            f"panel for {panel.country}: missing values present (interpolate first)"
        )
    y = panel.to_matrix()
    return _estimate_var_array(
        y,
        spec,
        variable_names=panel.variable_names,
        start_year=panel.start_year,
        label=panel.country,
    )


def _estimate_var_array(
    y: np.ndarray,
    spec: VarSpec,
    variable_names: tuple[str, ...],
    start_year: int = 0,
    label: str = "data",
) -> VarEstimate:
    t, k = y.shape
    p = spec.lag_order
    m = k * p + (1 if spec.include_constant else 0)
    t_eff = t - p
    if t_eff <= m:
        raise DataError(
            f"{label}: insufficient observations ({t_eff} effective, "
            f"{m} regressors per equation)"
        )

    x, y_dep = _lag_design(y, p, spec.include_constant, start=p)
    coefs, _, rank, _ = np.linalg.lstsq(x, y_dep, rcond=None)
    if rank < m:
        raise NumericError(f"{label}: collinear regressors in VAR design matrix")

    fitted = x @ coefs
    resid = y_dep - fitted
    sigma_ml = resid.T @ resid / t_eff
    sigma_ls = resid.T @ resid / (t_eff - m)
    xtx_inv = np.linalg.inv(x.T @ x)
    coef_cov = np.kron(sigma_ls, xtx_inv)

    offset = 1 if spec.include_constant else 0
    c = coefs[0] if spec.include_constant else np.zeros(k)
    a_mats = tuple(
        coefs[offset + lag * k : offset + (lag + 1) * k].T.copy() for lag in range(p)
    )

    reg_names = (["const"] if spec.include_constant else []) + [
        f"{v}(-{lag})" for lag in range(1, p + 1) for v in variable_names
    ]
    per_eq = []
    for i in range(k):
        ssr = float(resid[:, i] @ resid[:, i])
        dev = y_dep[:, i] - y_dep[:, i].mean()
        tss = float(dev @ dev)
        if tss > 0.0:
            r2 = 1.0 - ssr / tss
        else:
            r2 = 1.0 if ssr <= 1e-30 else 0.0
        adj_r2 = 1.0 - (1.0 - r2) * (t_eff - 1) / (t_eff - m)
        se_eq = math.sqrt(ssr / (t_eff - m))
        if m > 1:
            denom = (1.0 - r2) / (t_eff - m)
            f_stat = math.inf if denom <= 0.0 else (r2 / (m - 1)) / denom
        else:
            f_stat = math.nan
        if ssr > 0.0:
            ll = -0.5 * t_eff * (1.0 + _LOG_2PI) - 0.5 * t_eff * math.log(ssr / t_eff)
        else:
            ll = math.inf
        se_coefs = np.sqrt(sigma_ls[i, i] * np.diag(xtx_inv))
        with np.errstate(divide="ignore", invalid="ignore"):
            t_stats = np.where(se_coefs > 0.0, coefs[:, i] / se_coefs, np.inf)
        rows = tuple(
            CoefficientRow(reg_names[j], float(coefs[j, i]), float(se_coefs[j]),
                           float(t_stats[j]))
            for j in range(m)
        )
        per_eq.append(
            EquationStats(
                dependent=variable_names[i],
                r_squared=r2,
                adj_r_squared=adj_r2,
                ssr=ssr,
                se_equation=se_eq,
                f_stat=f_stat,
                log_likelihood=ll,
                coef_table=rows,
            )
        )

    return VarEstimate(
        variable_names=tuple(variable_names),
        lag_order=p,
        include_constant=spec.include_constant,
        A=a_mats,
        c=np.asarray(c, dtype=float),
        residuals=resid,
        fitted=fitted,
        sigma_u_ml=sigma_ml,
        sigma_u=sigma_ls,
        per_equation=tuple(per_eq),
        coef_cov=coef_cov,
        t_effective=t_eff,
        n_regressors=m,
        y=y,
        start_year=start_year,
    )


@dataclass(frozen=True)
class LagSelectionRow:
    lag: int
    log_l: float
    lr: float | None
    fpe: float
    aic: float
    sc: float
    hq: float


@dataclass(frozen=True)
class LagSelection:
    """Lag-order comparison table.

    ``starred`` maps each criterion name ("lr", "fpe", "aic", "sc", "hq") to
    its chosen lag on the common estimation sample.
    """

    rows: tuple[LagSelectionRow, ...]
    starred: dict[str, int]
    t_common: int

    @property
    def max_lag(self) -> int:
        return self.rows[-1].lag

    def majority_choice(self) -> int:
        """Lag picked by most criteria; ties resolve to the smaller lag."""
        votes: dict[int, int] = {}
        for lag in self.starred.values():
            votes[lag] = votes.get(lag, 0) + 1
        best = max(votes.values())
        return min(lag for lag, v in votes.items() if v == best)


def select_lag_order(panel: CountryPanel, max_lag: int) -> LagSelection:
    """Compare VAR(0..max_lag) fits on a common sample.

    All candidates condition on the first ``max_lag`` observations so the
    criteria are comparable. Per lag: system log-likelihood, sequential
    modified LR statistic, final prediction error, and the AIC/SC/HQ
    information criteria; each criterion's winner is starred.

    Raises
    ------
    DataError
        max_lag < 1 or too large for the sample ("insufficient observations").
    """
    if max_lag < 1:
        raise ValueError(f"max_lag must be >= 1, got {max_lag}")
    if not panel.is_complete:
        raise DataError(
            f"panel for {panel.country}: missing values present (interpolate first)"
        )
    y = panel.to_matrix()
    t, k = y.shape
    t_c = t - max_lag
    m_max = k * max_lag + 1
    if t_c <= m_max + k:
        raise DataError(
            f"panel for {panel.country}: insufficient observations for lag "
            f"selection up to {max_lag} ({t_c} common observations)"
        )

    rows: list[LagSelectionRow] = []
    prev_logdet: float | None = None
    lr_threshold = chi2.ppf(0.95, k * k)
    lr_significant: list[bool] = []
    for lag in range(max_lag + 1):
        x, y_dep = _lag_design(y, lag, True, start=max_lag)
        coefs, _, rank, _ = np.linalg.lstsq(x, y_dep, rcond=None)
        if rank < x.shape[1]:
            raise NumericError(
                f"panel for {panel.country}: collinear regressors at lag {lag}"
            )
        resid = y_dep - x @ coefs
        sigma_ml = resid.T @ resid / t_c
        sign, logdet = np.linalg.slogdet(sigma_ml)
        if sign <= 0 or not np.isfinite(logdet):
            raise NumericError(
                f"panel for {panel.country}: degenerate covariance at lag {lag}"
            )
        log_l = -0.5 * t_c * (k * (1.0 + _LOG_2PI) + logdet)
        m_eq = k * lag + 1
        n_total = k * m_eq
        aic = -2.0 * log_l / t_c + 2.0 * n_total / t_c
        sc = -2.0 * log_l / t_c + n_total * math.log(t_c) / t_c
        hq = -2.0 * log_l / t_c + 2.0 * n_total * math.log(math.log(t_c)) / t_c
        fpe = math.exp(logdet) * ((t_c + m_eq) / (t_c - m_eq)) ** k
        if lag == 0:
            lr = None
        else:
            lr = (t_c - m_eq) * (prev_logdet - logdet)
            lr_significant.append(lr > lr_threshold)
        prev_logdet = logdet
        rows.append(LagSelectionRow(lag, log_l, lr, fpe, aic, sc, hq))

    starred = {
        "fpe": min(rows, key=lambda r: r.fpe).lag,
        "aic": min(rows, key=lambda r: r.aic).lag,
        "sc": min(rows, key=lambda r: r.sc).lag,
        "hq": min(rows, key=lambda r: r.hq).lag,
    }
    # Sequential modified LR: scan down from max_lag, star the first
    # significant step; none significant -> lag 0.
    starred["lr"] = 0
    for lag in range(max_lag, 0, -1):
        if lr_significant[lag - 1]:
            starred["lr"] = lag
            break

    return LagSelection(rows=tuple(rows), starred=starred, t_common=t_c)


def companion_matrix(a_mats: tuple[np.ndarray, ...] | list[np.ndarray]) -> np.ndarray:
    """(K*p x K*p) companion form [[A_1 ... A_p], [I, 0]]."""
    a_mats = [np.asarray(a, dtype=float) for a in a_mats]
    k = a_mats[0].shape[0]
    p = len(a_mats)
    comp = np.zeros((k * p, k * p))
    comp[:k] = np.hstack(a_mats)
    if p > 1:
        comp[k:, : k * (p - 1)] = np.eye(k * (p - 1))
    return comp


def simulate_var(
    a_mats: tuple[np.ndarray, ...] | list[np.ndarray],
    intercept: np.ndarray,
    sigma_u: np.ndarray,
    n_obs: int,
    rng: np.random.Generator,
    initial: np.ndarray | None = None,
    burn_in: int = 0,
) -> np.ndarray:
    """Simulate a VAR(p) path of length ``n_obs`` with Gaussian shocks.

    ``initial`` is a (p x K) block of presample values (defaults to zeros);
    ``burn_in`` extra leading steps are simulated and dropped. Shocks are
    drawn as chol(sigma_u) @ z with z standard normal, so a fixed ``rng``
    state reproduces the path exactly.
    """
    a_mats = [np.asarray(a, dtype=float) for a in a_mats]
    k = a_mats[0].shape[0]
    p = len(a_mats)
    c = np.asarray(intercept, dtype=float)
    sigma = np.asarray(sigma_u, dtype=float)
    try:
        chol = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        # Positive *semi*definite covariances (e.g. all-zero for a noiseless
        # path) are legitimate; only indefinite input is an error.
        vals, vecs = np.linalg.eigh((sigma + sigma.T) / 2.0)
        if vals.min() < -1e-12 * max(1.0, float(vals.max())):
            raise NumericError(
                "Cholesky failed: shock covariance not positive semidefinite"
            ) from None
        chol = vecs * np.sqrt(np.clip(vals, 0.0, None))[None, :]

    total = n_obs + burn_in
    hist = np.zeros((p, k)) if initial is None else np.array(initial, dtype=float)
    if hist.shape != (p, k):
        raise ValueError(f"initial must be ({p}, {k}), got {hist.shape}")
    out = np.empty((total, k))
    shocks = rng.standard_normal((total, k)) @ chol.T
    # hist rows: [y_{t-p}, ..., y_{t-1}]
    for t in range(total):
        y_t = c + shocks[t]
        for lag in range(1, p + 1):
            y_t = y_t + a_mats[lag - 1] @ hist[p - lag]
        out[t] = y_t
        hist = np.vstack([hist[1:], y_t]) if p > 1 else y_t[None, :]
    return out[burn_in:]
