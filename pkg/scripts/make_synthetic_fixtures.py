#!/usr/bin/env python3
"""Regenerate the bundled synthetic country datasets under data/synthetic/.

Each dataset is a 33-year draw from the reference three-variable VAR(2)
system used throughout the test suite (HDI, government health expenditure,
government education expenditure). Seeds and initial conditions were chosen
so that every dataset satisfies the downstream pipeline's requirements:

* HDI stays strictly inside [0, 1],
* both expenditure series stay positive,
* a VAR(2) fitted to the data is dynamically stable,
* the full analysis pipeline runs with no skipped stages.

The script is deterministic; run it from the repository root to reproduce
the committed CSVs byte for byte.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np

from macrovar.pipeline import PipelineConfig, run_pipeline
from macrovar.varmodel import simulate_var

# Reference VAR(2) system shared with the test suite (see tests/conftest.py).
A1 = np.array(
    [
        [0.8518, -0.0142, 0.0000],
        [-0.0526, 0.9870, 0.0001],
        [-1251.811, 80.2312, 0.4697],
    ]
)
A2 = np.array(
    [
        [0.1196, 0.0051, 0.0001],
        [0.9226, -0.3488, 0.0004],
        [1194.255, -4.4162, 0.2109],
    ]
)
INTERCEPT = np.array([0.0398, 0.2884, -96.5367])
SHOCK_SD = np.array([0.0040, 0.0609, 16.5207])

N_YEARS = 33
START_YEAR = 1990

# (seed, two presample rows) per country; chosen by search so the draw meets
# the constraints listed in the module docstring.
COUNTRY_SETUPS = {
    "bangladesh": (1, [[0.45, 0.90, 250.0], [0.455, 0.91, 252.0]]),
    "india": (13, [[0.48, 1.05, 280.0], [0.486, 1.07, 283.0]]),
    "pakistan": (29, [[0.42, 0.80, 220.0], [0.425, 0.81, 222.0]]),
}


def generate(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    sigma = np.diag(SHOCK_SD**2)
    for country, (seed, initial) in COUNTRY_SETUPS.items():
        rng = np.random.default_rng(seed)
        y = simulate_var(
            [A1, A2], INTERCEPT, sigma, N_YEARS, rng, initial=np.asarray(initial)
        )
        path = out_dir / f"{country}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["year", "hdi", "gov_exp_health", "gov_exp_edu"])
            for i in range(N_YEARS):
                writer.writerow(
                    [
                        START_YEAR + i,
                        f"{y[i, 0]:.6f}",
                        f"{y[i, 1]:.6f}",
                        f"{y[i, 2]:.4f}",
                    ]
                )
        print(f"wrote {path}")


def verify(out_dir: Path) -> None:
    """Run the full pipeline over the generated files and require a clean pass."""
    config = PipelineConfig(
        countries=tuple(COUNTRY_SETUPS),
        data_source="csv_dir",
        csv_dir=str(out_dir),
        seed=42,
        irf_band_draws=200,
    )
    report = run_pipeline(config)
    for result in report.countries:
        if result.skipped:
            raise SystemExit(
                f"{result.country}: pipeline skipped stages {sorted(result.skipped)}"
            )
        if not result.stability.stable:
            raise SystemExit(f"{result.country}: fitted VAR is not stable")
        hdi = result.panel.get("hdi").to_array()
        if hdi.min() <= 0.0 or hdi.max() >= 1.0:
            raise SystemExit(f"{result.country}: HDI leaves (0, 1)")
        print(
            f"verified {result.country}: lag={result.chosen_lag}, "
            f"max root modulus={result.stability.max_modulus:.4f}, "
            f"cointegration rank={result.johansen.rank_decision}"
        )


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    out_dir = Path(args[0]) if args else Path("data/synthetic")
    generate(out_dir)
    verify(out_dir)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
