"""Data ingestion: country CSV files and an optional World Bank indicators
client with a replayable on-disk cache.

CSV contract (one file per country): header ``year,hdi,gov_exp_health,
gov_exp_edu``, UTF-8, ``.`` decimal separator, empty cell = missing value.
The World Bank path fetches the two expenditure indicators from the public
API and reads HDI from a user-supplied CSV (columns ``country,year,hdi``),
since HDI is not a World Bank series. Every HTTP response is cached to disk
keyed by URL; cache hits never touch the network, so a warmed cache is fully
usable offline.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError
from .series import AnnualSeries, CountryPanel

__all__ = [
    "VARIABLE_NAMES",
    "DEFAULT_INDICATOR_CODES",
    "COUNTRY_CODES",
    "read_country_csv",
    "read_hdi_csv",
    "WorldBankClient",
    "fetch_indicators",
]

VARIABLE_NAMES = ("hdi", "gov_exp_health", "gov_exp_edu")

# Indicator codes are configuration with defaults: current health expenditure
# and government education expenditure, both % of GDP.
DEFAULT_INDICATOR_CODES = {
    "gov_exp_health": "SH.XPD.CHEX.GD.ZS",
    "gov_exp_edu": "SE.XPD.TOTL.GD.ZS",
}

COUNTRY_CODES = {"bangladesh": "BGD", "india": "IND", "pakistan": "PAK"}


def _parse_cell(raw: str, path: Path, line: int, column: str) -> float | None:
    raw = raw.strip()
    if raw == "":
        return None
    try:
        return float(raw)
    except ValueError:
        raise DataError(
            f"{path}: line {line}: cannot parse {column}={raw!r} as a number"
        ) from None


def _check_hdi_domain(values, where: str) -> None:
    bad = [v for v in values if v is not None and not 0.0 <= v <= 1.0]
    if bad:
        raise DataError(f"{where}: hdi values outside [0, 1]: {bad[:3]}")


def read_country_csv(path: str | Path, country: str | None = None) -> CountryPanel:
    """Read one country's panel from CSV, preserving missing cells.

    Raises DataError for a missing required column ("missing column: hdi"),
    out-of-range HDI, unparsable cells, duplicate or non-consecutive years,
    or an empty file.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: file not found")
    country = country if country is not None else path.stem
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in ("year", *VARIABLE_NAMES):
            if col not in header:
                raise DataError(f"{path}: missing column: {col}")
        rows = list(reader)
    if not rows:
        raise DataError(f"{path}: insufficient data, no rows")

    parsed: list[tuple[int, dict[str, float | None]]] = []
    for n, row in enumerate(rows, start=2):
        try:
            year = int(row["year"].strip())
        except (ValueError, AttributeError):
            raise DataError(
                f"{path}: line {n}: cannot parse year={row.get('year')!r}"
            ) from None
        parsed.append(
            (year, {v: _parse_cell(row[v] or "", path, n, v) for v in VARIABLE_NAMES})
        )
    parsed.sort(key=lambda item: item[0])
    years = [y for y, _ in parsed]
    if len(set(years)) != len(years):
        raise DataError(f"{path}: duplicate years in input")
    if years != list(range(years[0], years[0] + len(years))):
        raise DataError(f"{path}: years are not consecutive ({years[0]}..{years[-1]})")

    variables = tuple(
        AnnualSeries(
            name=v,
            country=country,
            start_year=years[0],
            values=tuple(cells[v] for _, cells in parsed),
        )
        for v in VARIABLE_NAMES
    )
    _check_hdi_domain(variables[0].values, str(path))
    return CountryPanel(country=country, variables=variables, ordering=VARIABLE_NAMES)


def read_hdi_csv(path: str | Path, country: str) -> dict[int, float]:
    """Read HDI values for one country from a long-form CSV
    (columns ``country,year,hdi``)."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: file not found")
    values: dict[int, float] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in ("country", "year", "hdi"):
            if col not in header:
                raise DataError(f"{path}: missing column: {col}")
        for n, row in enumerate(reader, start=2):
            if row["country"].strip().lower() != country.lower():
                continue
            year = int(row["year"].strip())
            val = _parse_cell(row["hdi"] or "", path, n, "hdi")
            if val is not None:
                values[year] = val
    if not values:
        raise DataError(f"{path}: insufficient data, no HDI rows for {country!r}")
    _check_hdi_domain(values.values(), str(path))
    return values


class WorldBankClient:
    """Minimal World Bank indicators API client with a disk cache.

    Responses are cached under ``cache_dir`` keyed by the request URL; cache
    hits bypass the network entirely. With ``offline=True`` a cache miss is a
    DataError instead of a network call.
    """

    def __init__(
        self,
        cache_dir: str | Path,
        offline: bool = False,
        retries: int = 3,
        timeout: float = 30.0,
        base_url: str = "https://api.worldbank.org/v2",
        retry_wait: float = 1.0,
    ) -> None:
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.offline = offline
        self.retries = retries
        self.timeout = timeout
        self.base_url = base_url.rstrip("/")
        self.retry_wait = retry_wait

    def _cache_path(self, url: str) -> Path:
        key = hashlib.sha256(url.encode("utf-8")).hexdigest()
        return self.cache_dir / f"{key}.json"

    def _get(self, url: str) -> bytes:
        cache_file = self._cache_path(url)
        if cache_file.exists():
            return cache_file.read_bytes()
        if self.offline:
            raise DataError(f"offline mode: no cached response for {url}")
        import requests

        last_error: Exception | None = None
        for attempt in range(1, self.retries + 1):
            try:
                resp = requests.get(url, timeout=self.timeout)
                if resp.status_code == 200:
                    cache_file.write_bytes(resp.content)
                    return resp.content
                last_error = DataError(f"HTTP {resp.status_code}")
            except requests.RequestException as exc:  # pragma: no cover - network
                last_error = exc
            if attempt < self.retries:
                time.sleep(self.retry_wait)
        raise DataError(
            f"HTTP fetch failed after {self.retries} retries: {url} ({last_error})"
        )

    def fetch_indicator(self, country_code: str, indicator: str) -> dict[int, float]:
        """Annual values {year: value} for one indicator, missing years absent."""
        url = (
            f"{self.base_url}/country/{country_code}/indicator/{indicator}"
            "?format=json&per_page=20000"
        )
        raw = self._get(url)
        try:
            payload = json.loads(raw.decode("utf-8"))
        except (ValueError, UnicodeDecodeError):
            raise DataError(f"malformed JSON from {url}") from None
        if not isinstance(payload, list) or len(payload) < 2 or payload[1] is None:
            raise DataError(
                f"unexpected response shape from {url}: missing data array"
            )
        out: dict[int, float] = {}
        for entry in payload[1]:
            if entry.get("value") is None:
                continue
            try:
                out[int(entry["date"])] = float(entry["value"])
            except (KeyError, TypeError, ValueError):
                raise DataError(
                    f"unexpected record in response from {url}: {entry!r}"
                ) from None
        return out


def _series_from_map(
    values: dict[int, float], name: str, country: str, span: tuple[int, int]
) -> AnnualSeries:
    lo, hi = span
    return AnnualSeries(
        name=name,
        country=country,
        start_year=lo,
        values=tuple(values.get(y) for y in range(lo, hi + 1)),
    )


def fetch_indicators(
    country: str,
    source: str,
    csv_dir: str | Path | None = None,
    client: WorldBankClient | None = None,
    hdi_csv: str | Path | None = None,
    indicator_codes: dict[str, str] | None = None,
    year_range: tuple[int, int] | None = None,
) -> CountryPanel:
    """Return the raw (gaps preserved) panel for one country.

    ``source`` is "csv_dir" (reads <csv_dir>/<country>.csv) or
    "worldbank_fetch" (expenditure series from the API via ``client``, HDI
    from ``hdi_csv``). ``year_range`` optionally clips the fetched span.
    """
    if source == "csv_dir":
        if csv_dir is None:
            raise DataError("csv_dir source requires a csv_dir path")
        return read_country_csv(Path(csv_dir) / f"{country}.csv", country)
    if source != "worldbank_fetch":
        raise ValueError(f"unknown data source {source!r}")

    if client is None:
        raise DataError("worldbank_fetch source requires a WorldBankClient")
    if hdi_csv is None:
        raise DataError("worldbank_fetch source requires an hdi_csv path")
    codes = dict(DEFAULT_INDICATOR_CODES)
    if indicator_codes:
        codes.update(indicator_codes)
    iso3 = COUNTRY_CODES.get(country.lower(), country if len(country) == 3 else None)
    if iso3 is None:
        raise DataError(
            f"no ISO3 code known for {country!r}; pass a 3-letter code"
        )

    hdi = read_hdi_csv(hdi_csv, country)
    health = client.fetch_indicator(iso3, codes["gov_exp_health"])
    edu = client.fetch_indicator(iso3, codes["gov_exp_edu"])
    if not health or not edu:
        raise DataError(f"insufficient data: empty indicator response for {country}")

    if year_range is None:
        all_years = set(hdi) | set(health) | set(edu)
        year_range = (min(all_years), max(all_years))
    variables = tuple(
        _series_from_map(vals, name, country, year_range)
        for name, vals in (
            ("hdi", hdi),
            ("gov_exp_health", health),
            ("gov_exp_edu", edu),
        )
    )
    return CountryPanel(country=country, variables=variables, ordering=VARIABLE_NAMES)
