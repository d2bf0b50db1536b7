"""Annual time-series containers and basic transforms.

An :class:`AnnualSeries` is one named series for one country, observed on
consecutive calendar years, with missing values stored explicitly as ``None``.
A :class:`CountryPanel` bundles several series with identical year coverage.
All containers are immutable; the transform functions return new objects.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DataError

__all__ = [
    "AnnualSeries",
    "CountryPanel",
    "interpolate_gaps",
    "first_difference",
    "align_panel",
]


@dataclass(frozen=True)
class AnnualSeries:
    """One annual time series for one country.

    ``values[i]`` belongs to year ``start_year + i``; ``None`` marks a
    missing observation.
    """

    name: str
    country: str
    start_year: int
    values: tuple[float | None, ...]

    def __post_init__(self) -> None:
        vals = tuple(None if v is None else float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) == 0:
            raise DataError(f"series {self.name!r}: values must be non-empty")

    @property
    def n_years(self) -> int:
        return len(self.values)

    @property
    def end_year(self) -> int:
        return self.start_year + len(self.values) - 1

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(range(self.start_year, self.start_year + len(self.values)))

    @property
    def mask(self) -> np.ndarray:
        """Boolean array, True where the value is observed."""
        return np.array([v is not None for v in self.values])

    @property
    def is_complete(self) -> bool:
        return all(v is not None for v in self.values)

    def to_array(self) -> np.ndarray:
        """Values as a float array with NaN in place of missing entries."""
        return np.array([np.nan if v is None else v for v in self.values])

    def window(self, start_year: int, end_year: int) -> "AnnualSeries":
        """Slice to the inclusive year range [start_year, end_year]."""
        if start_year < self.start_year or end_year > self.end_year:
            raise DataError(
                f"series {self.name!r}: window {start_year}-{end_year} outside "
                f"{self.start_year}-{self.end_year}"
            )
        lo = start_year - self.start_year
        hi = end_year - self.start_year + 1
        return replace(self, start_year=start_year, values=self.values[lo:hi])


@dataclass(frozen=True)
class CountryPanel:
    """Aligned multivariate annual dataset for one country.

    ``ordering`` is the variable permutation used for recursive (Cholesky)
    shock identification; it defaults to the input column order.
    """

    country: str
    variables: tuple[AnnualSeries, ...]
    ordering: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "ordering", tuple(self.ordering))
        if not self.variables:
            raise DataError("panel must contain at least one variable")
        names = [s.name for s in self.variables]
        if len(set(names)) != len(names):
            raise DataError(f"duplicate variable names in panel: {names}")
        first = self.variables[0]
        for s in self.variables:
            if s.country != self.country:
                raise DataError(
                    f"series {s.name!r} belongs to {s.country!r}, not {self.country!r}"
                )
            if s.start_year != first.start_year or s.n_years != first.n_years:
                raise DataError(
                    f"series {s.name!r} spans {s.start_year}-{s.end_year}, "
                    f"expected {first.start_year}-{first.end_year}"
                )
        if sorted(self.ordering) != sorted(names):
            raise DataError(
                f"ordering {self.ordering} is not a permutation of {names}"
            )

    @property
    def start_year(self) -> int:
        return self.variables[0].start_year

    @property
    def n_years(self) -> int:
        return self.variables[0].n_years

    @property
    def years(self) -> tuple[int, ...]:
        return self.variables[0].years

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.variables)

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def is_complete(self) -> bool:
        return all(s.is_complete for s in self.variables)

    def get(self, name: str) -> AnnualSeries:
        for s in self.variables:
            if s.name == name:
                return s
        raise DataError(f"no variable named {name!r} in panel for {self.country}")

    def to_matrix(self) -> np.ndarray:
        """(T, K) float matrix in column order ``variable_names``, NaN = missing."""
        return np.column_stack([s.to_array() for s in self.variables])


def interpolate_gaps(series: AnnualSeries) -> AnnualSeries:
    """Fill interior missing values by linear interpolation between the
    nearest observed neighbours. Observed values are left untouched.

    Raises DataError for leading/trailing gaps (no extrapolation) or when
    fewer than two observations exist.
    """
    mask = series.mask
    if mask.all():
        return series
    if int(mask.sum()) < 2:
        raise DataError(f"series {series.name!r}: insufficient data to interpolate")
    if not mask[0] or not mask[-1]:
        raise DataError(
            f"series {series.name!r}: cannot extrapolate leading/trailing missing values"
        )
    x = series.to_array()
    idx = np.arange(len(x))
    filled = np.interp(idx, idx[mask], x[mask])
    return replace(series, values=tuple(float(v) for v in filled))


def first_difference(series: AnnualSeries) -> AnnualSeries:
    """Year-over-year difference: output year t holds value(t) - value(t-1)."""
    if series.n_years < 2:
        raise DataError(f"series {series.name!r}: need at least 2 values to difference")
    if not series.is_complete:
        raise DataError(f"series {series.name!r}: cannot difference with missing values")
    x = series.to_array()
    d = np.diff(x)
    return replace(
        series, start_year=series.start_year + 1, values=tuple(float(v) for v in d)
    )


def align_panel(
    series_list: list[AnnualSeries] | tuple[AnnualSeries, ...],
    ordering: tuple[str, ...] | None = None,
) -> CountryPanel:
    """Build a fully observed panel from raw series.

    Per series, leading/trailing missing stretches are trimmed and interior
    gaps are linearly interpolated; the panel is then cut to the common year
    range. Raises DataError when the series share no years.
    """
    series_list = list(series_list)
    if not series_list:
        raise DataError("align_panel: no series given")
    country = series_list[0].country
    for s in series_list:
        if s.country != country:
            raise DataError(
                f"align_panel: mixed countries {country!r} and {s.country!r}"
            )

    trimmed = []
    for s in series_list:
        mask = s.mask
        if not mask.any():
            raise DataError(f"series {s.name!r}: insufficient data, all values missing")
        obs = np.flatnonzero(mask)
        lo, hi = int(obs[0]), int(obs[-1])
        t = s.window(s.start_year + lo, s.start_year + hi)
        trimmed.append(interpolate_gaps(t))

    start = max(s.start_year for s in trimmed)
    end = min(s.end_year for s in trimmed)
    if end < start:
        raise DataError(
            f"align_panel: empty overlap, year ranges are disjoint for {country}"
        )
    windowed = tuple(s.window(start, end) for s in trimmed)
    if ordering is None:
        ordering = tuple(s.name for s in windowed)
    return CountryPanel(country=country, variables=windowed, ordering=tuple(ordering))
