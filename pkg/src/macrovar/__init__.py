"""macrovar: a VAR econometrics toolkit for annual country panels.

Library + CLI covering the full workflow: series transforms, ADF unit-root
and Johansen cointegration tests, VAR estimation and lag selection, Granger
causality, stability, residual diagnostics, and Cholesky-orthogonalized
structural decompositions (IRF / FEVD / historical decomposition), with
deterministic seeded pipelines and markdown/CSV/JSON reports.
"""

from ._version import __version__
from .errors import DataError, MacroVarError, NumericError
from .series import (
    AnnualSeries,
    CountryPanel,
    align_panel,
    first_difference,
    interpolate_gaps,
)
from .stationarity import AdfResult, JohansenResult, adf_test, johansen_test
from .varmodel import (
    EquationStats,
    LagSelection,
    VarEstimate,
    VarSpec,
    companion_matrix,
    estimate_var,
    select_lag_order,
    simulate_var,
)
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
from .structural import (
    IrfBands,
    StructuralSet,
    historical_decomposition,
    impulse_responses,
    irf_confidence_bands,
    structural_analysis,
    variance_decomposition,
)
from .fetch import WorldBankClient, fetch_indicators, read_country_csv
from .pipeline import (
    HoldoutEval,
    PipelineConfig,
    RunReport,
    holdout_forecast_eval,
    run_pipeline,
)
from .report import TestReport, render_report

__all__ = [
    "__version__",
    "MacroVarError",
    "DataError",
    "NumericError",
    "AnnualSeries",
    "CountryPanel",
    "interpolate_gaps",
    "first_difference",
    "align_panel",
    "AdfResult",
    "JohansenResult",
    "adf_test",
    "johansen_test",
    "VarSpec",
    "VarEstimate",
    "EquationStats",
    "LagSelection",
    "estimate_var",
    "select_lag_order",
    "companion_matrix",
    "simulate_var",
    "WaldBlockResult",
    "StabilityResult",
    "CrossCorrResult",
    "LmResult",
    "granger_wald",
    "stability_roots",
    "residual_cross_correlations",
    "serial_correlation_lm",
    "StructuralSet",
    "IrfBands",
    "structural_analysis",
    "impulse_responses",
    "variance_decomposition",
    "historical_decomposition",
    "irf_confidence_bands",
    "WorldBankClient",
    "fetch_indicators",
    "read_country_csv",
    "PipelineConfig",
    "RunReport",
    "HoldoutEval",
    "run_pipeline",
    "holdout_forecast_eval",
    "TestReport",
    "render_report",
]
