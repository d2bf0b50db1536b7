"""Exception hierarchy. DataError maps to CLI exit code 2, NumericError to 3."""


class MacroVarError(Exception):
    """Base class for all errors raised by this package."""


class DataError(MacroVarError):
    """Invalid, missing, or insufficient input data."""


class NumericError(MacroVarError):
    """Numerical failure: collinearity, degenerate covariance, failed factorization."""
