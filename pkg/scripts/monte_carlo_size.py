#!/usr/bin/env python3
"""Monte Carlo size studies for the unit-root, cointegration, and residual
serial-correlation tests.

Simulates data under each test's null hypothesis and reports empirical
rejection rates at the 5% level (and, for the LM test, the Kolmogorov-
Smirnov distance of the p-values from uniformity). Used to calibrate and
sanity-check the embedded finite-sample critical values.

Notes on the data-generating processes:

* ADF: driftless Gaussian random walks.
* Cointegration: independent random walks *with drift*. The intercept-
  no-trend asymptotic tables assume the drift-dominated case; driftless
  walks follow a different limiting distribution and would overstate size.
* LM: a stable VAR(1) with i.i.d. Gaussian innovations (no serial
  correlation in the errors).
"""

from __future__ import annotations

import argparse
import time

import numpy as np
from scipy import stats

from macrovar.series import AnnualSeries, CountryPanel
from macrovar.stationarity import adf_test, johansen_test
from macrovar.diagnostics import serial_correlation_lm
from macrovar.varmodel import VarSpec, estimate_var


def _series(values: np.ndarray, name: str = "v1") -> AnnualSeries:
    return AnnualSeries(name, "mc", 2000, tuple(float(v) for v in values))


def _panel(y: np.ndarray) -> CountryPanel:
    names = tuple(f"v{j + 1}" for j in range(y.shape[1]))
    return CountryPanel(
        country="mc",
        variables=tuple(_series(y[:, j], n) for j, n in enumerate(names)),
        ordering=names,
    )


def adf_size(reps: int, t_obs: int, rng: np.random.Generator) -> float:
    rejections = 0
    for _ in range(reps):
        walk = np.cumsum(rng.standard_normal(t_obs))
        result = adf_test(_series(walk))
        rejections += result.p_value < 0.05
    return rejections / reps


def johansen_size(
    reps: int, t_obs: int, k: int, drift: float, rng: np.random.Generator
) -> float:
    rejections = 0
    for _ in range(reps):
        steps = drift + rng.standard_normal((t_obs, k))
        y = np.cumsum(steps, axis=0)
        result = johansen_test(_panel(y), lags_in_differences=1)
        rejections += result.trace_stats[0] > result.trace_cv_5pct[0]
    return rejections / reps


def lm_ks(reps: int, t_obs: int, rng: np.random.Generator) -> float:
    a1 = np.array([[0.5, 0.1], [0.0, 0.3]])
    pvals = []
    for _ in range(reps):
        y = np.zeros((t_obs, 2))
        shocks = rng.standard_normal((t_obs, 2))
        for t in range(1, t_obs):
            y[t] = a1 @ y[t - 1] + shocks[t]
        est = estimate_var(_panel(y), VarSpec(lag_order=1))
        pvals.append(serial_correlation_lm(est, max_lag=1).row(1, "at_lag").p_lre)
    return stats.kstest(pvals, "uniform").statistic


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--adf-reps", type=int, default=2000)
    parser.add_argument("--adf-t", type=int, default=200)
    parser.add_argument("--johansen-reps", type=int, default=1000)
    parser.add_argument("--johansen-t", type=int, default=500)
    parser.add_argument("--johansen-k", type=int, default=3)
    parser.add_argument("--drift", type=float, default=0.5)
    parser.add_argument("--lm-reps", type=int, default=500)
    parser.add_argument("--lm-t", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)

    start = time.perf_counter()
    size = adf_size(args.adf_reps, args.adf_t, rng)
    print(
        f"ADF 5% size: {size:.4f} "
        f"({args.adf_reps} reps, T={args.adf_t}, {time.perf_counter() - start:.1f}s)"
    )

    start = time.perf_counter()
    size = johansen_size(
        args.johansen_reps, args.johansen_t, args.johansen_k, args.drift, rng
    )
    print(
        f"cointegration trace 'None' 5% size: {size:.4f} "
        f"({args.johansen_reps} reps, T={args.johansen_t}, K={args.johansen_k}, "
        f"drift={args.drift}, {time.perf_counter() - start:.1f}s)"
    )

    start = time.perf_counter()
    ks = lm_ks(args.lm_reps, args.lm_t, rng)
    print(
        f"LM p-value KS distance from uniform: {ks:.4f} "
        f"({args.lm_reps} reps, T={args.lm_t}, {time.perf_counter() - start:.1f}s)"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
