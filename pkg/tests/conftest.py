"""Shared fixtures: the reference VAR(2) system, panel builders, and a
terminal-summary hook that prints one PASS/FAIL line per acceptance
criterion at the end of the run."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

from macrovar.series import AnnualSeries, CountryPanel

REPO_ROOT = Path(__file__).resolve().parents[1]
SYNTHETIC_DIR = REPO_ROOT / "data" / "synthetic"

# Reference three-variable VAR(2) system (HDI, government health expenditure,
# government education expenditure) shared by the test suite and the bundled
# dataset generator. The largest companion root has modulus 0.997648
# (marginally below unity) per the frozen oracle values in the acceptance
# tests.
REF_A1 = np.array(
    [
        [0.8518, -0.0142, 0.0000],
        [-0.0526, 0.9870, 0.0001],
        [-1251.811, 80.2312, 0.4697],
    ]
)
REF_A2 = np.array(
    [
        [0.1196, 0.0051, 0.0001],
        [0.9226, -0.3488, 0.0004],
        [1194.255, -4.4162, 0.2109],
    ]
)
REF_INTERCEPT = np.array([0.0398, 0.2884, -96.5367])
REF_SHOCK_SD = np.array([0.0040, 0.0609, 16.5207])
REF_NAMES = ("hdi", "gov_exp_health", "gov_exp_edu")


def make_panel(
    y: np.ndarray,
    names: tuple[str, ...] | None = None,
    country: str = "test",
    start_year: int = 1990,
    ordering: tuple[str, ...] | None = None,
) -> CountryPanel:
    """Build an aligned panel from a (T, K) matrix of observations."""
    y = np.asarray(y, dtype=float)
    if names is None:
        names = tuple(f"v{j + 1}" for j in range(y.shape[1]))
    return CountryPanel(
        country=country,
        variables=tuple(
            AnnualSeries(n, country, start_year, tuple(float(v) for v in y[:, j]))
            for j, n in enumerate(names)
        ),
        ordering=names if ordering is None else ordering,
    )


def simulate_stable_var(
    rng: np.random.Generator,
    k: int,
    p: int,
    t_obs: int,
    target_radius: float = 0.9,
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Draw a random stable VAR(p) and simulate ``t_obs`` observations.

    Coefficients are rescaled through the lag operator (A_j -> s^j A_j) so
    the companion spectral radius equals ``target_radius`` exactly whenever
    the raw draw is explosive, and is left alone otherwise.
    """
    from macrovar.varmodel import companion_matrix, simulate_var

    a_mats = [rng.normal(scale=0.4, size=(k, k)) for _ in range(p)]
    radius = np.abs(np.linalg.eigvals(companion_matrix(a_mats))).max()
    if radius > target_radius:
        s = target_radius / radius
        a_mats = [a * s ** (j + 1) for j, a in enumerate(a_mats)]
    intercept = rng.normal(scale=0.5, size=k)
    cov_root = rng.normal(scale=0.5, size=(k, k))
    sigma = cov_root @ cov_root.T + 0.1 * np.eye(k)
    y = simulate_var(a_mats, intercept, sigma, t_obs, rng, burn_in=50)
    return y, a_mats


@pytest.fixture(scope="session")
def synthetic_dir() -> Path:
    assert SYNTHETIC_DIR.is_dir(), "bundled synthetic datasets are missing"
    return SYNTHETIC_DIR


@pytest.fixture(scope="session")
def bangladesh_panel() -> CountryPanel:
    from macrovar.fetch import read_country_csv

    return read_country_csv(SYNTHETIC_DIR / "bangladesh.csv")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "ACCEPTANCE_RESULTS", None) if module else None
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, ok in results:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
