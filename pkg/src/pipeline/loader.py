"""Load macro series from CSV or JSON files with schema `country?,period,q,g,c`"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd

from core.errors import DataInputError, EmptySeriesError
from core.types import MacroObservation, MacroSeries

logger = logging.getLogger(__name__)

RATE_COLUMNS = ("q", "g", "c")
REQUIRED_COLUMNS = ("period",) + RATE_COLUMNS

_INTEGER = re.compile(r"^[+-]?\d+$")


@dataclass
class LoadedFrame:
    """Validated rows plus the number of incomplete rows that were dropped"""
    frame: pd.DataFrame
    dropped_rows: int
    has_country: bool


def _read_raw(path: Path, format: Optional[str]) -> pd.DataFrame:
    fmt = (format or path.suffix.lstrip(".") or "csv").lower()
    if not path.exists():
        raise DataInputError(f"input file not found: {path}")
    if path.stat().st_size == 0:
        raise EmptySeriesError(f"{path} is empty")
    try:
        if fmt == "csv":
            return pd.read_csv(path, dtype=str, keep_default_na=True, skipinitialspace=True)
        if fmt == "json":
            return pd.read_json(path, orient="records", dtype=False, convert_dates=False)
    except pd.errors.EmptyDataError:
        raise EmptySeriesError(f"{path} is empty") from None
    except (pd.errors.ParserError, ValueError) as e:
        raise DataInputError(f"could not parse {path}: {e}") from None
    raise DataInputError(f"unsupported input format {fmt!r}; use csv or json")


def _normalize_period(value) -> Union[int, str]:
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, int):
        return value
    text = str(value).strip()
    return int(text) if _INTEGER.match(text) else text


def _is_missing(column: pd.Series) -> pd.Series:
    return column.isna() | (column.astype(str).str.strip() == "")


def validate_frame(raw: pd.DataFrame, source: str = "input") -> LoadedFrame:
    """Check columns and cells, drop incomplete rows, keep row order"""
    if raw.empty:
        raise EmptySeriesError(f"{source} has no rows")
    raw = raw.rename(columns=lambda name: str(name).strip().lower())
    missing_cols = [col for col in REQUIRED_COLUMNS if col not in raw.columns]
    if missing_cols:
        raise DataInputError(f"{source}: missing column(s) {', '.join(missing_cols)}")
    has_country = "country" in raw.columns
    columns = (["country"] if has_country else []) + list(REQUIRED_COLUMNS)
    raw = raw[columns]

    incomplete = pd.Series(False, index=raw.index)
    for col in columns:
        incomplete |= _is_missing(raw[col])

    frame = raw.loc[~incomplete].copy()
    dropped = int(incomplete.sum())
    if dropped:
        logger.warning(f"{source}: dropped {dropped} row(s) with missing fields")
    if frame.empty:
        raise EmptySeriesError(f"{source} has no complete rows")

    for col in RATE_COLUMNS:
        parsed = pd.to_numeric(frame[col], errors="coerce")
        bad = parsed.isna()
        if bad.any():
            row = frame.index[bad.to_numpy()][0]
            raise DataInputError(f"{source}: non-numeric {col} value {frame.at[row, col]!r} in row {row + 1}")
        frame[col] = parsed.astype(float)

    frame["period"] = [_normalize_period(v) for v in frame["period"]]
    if has_country:
        frame["country"] = frame["country"].astype(str).str.strip()

    keys = ["country", "period"] if has_country else ["period"]
    duplicated = frame.duplicated(subset=keys, keep=False)
    if duplicated.any():
        dupes = sorted({tuple(str(v) for v in row) for row in frame.loc[duplicated, keys].itertuples(index=False)})
        raise DataInputError(f"{source}: duplicate keys {dupes[:5]}")

    return LoadedFrame(frame=frame.reset_index(drop=True), dropped_rows=dropped, has_country=has_country)


def _series(frame: pd.DataFrame, country: Optional[str]) -> MacroSeries:
    observations = tuple(
        MacroObservation(period=row.period, q=float(row.q), g=float(row.g), c=float(row.c))
        for row in frame.itertuples(index=False)
    )
    return MacroSeries(observations, country=country)


def series_from_frame(loaded: LoadedFrame) -> Union[MacroSeries, Dict[str, MacroSeries]]:
    if not loaded.has_country:
        return _series(loaded.frame, None)
    panel: Dict[str, MacroSeries] = {}
    for country in sorted(loaded.frame["country"].unique()):
        rows = loaded.frame[loaded.frame["country"] == country]
        panel[country] = _series(rows, country)
    return panel


def read_frame(path: Union[str, Path], format: Optional[str] = None) -> LoadedFrame:
    path = Path(path)
    return validate_frame(_read_raw(path, format), source=str(path))


def load_series(
    path: Union[str, Path],
    format: Optional[str] = None,
) -> Union[MacroSeries, Dict[str, MacroSeries]]:
    """Parse and validate a series file.

    Returns one MacroSeries, or a per-country map (sorted by country) when
    the file has a country column. Rows with a missing field are dropped
    with a warning.
    """
    loaded = read_frame(path, format)
    result = series_from_frame(loaded)
    n_countries = len(result) if isinstance(result, dict) else 1
    logger.info(f"Loaded {len(loaded.frame)} rows for {n_countries} series from {path}")
    return result


def load_panel(path: Union[str, Path], format: Optional[str] = None) -> Dict[str, MacroSeries]:
    """Per-country map; a file without a country column becomes one entry keyed by its stem"""
    result = load_series(path, format)
    if isinstance(result, MacroSeries):
        key = Path(path).stem
        return {key: MacroSeries(result.observations, country=key)}
    return result


def select_country(panel: Dict[str, MacroSeries], country: str) -> MacroSeries:
    if country not in panel:
        available: List[str] = list(panel)
        raise DataInputError(f"country {country!r} not in input; available: {', '.join(available[:10])}")
    return panel[country]
