"""World Bank indicators client with a per-indicator CSV cache"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import pandas as pd
import requests
from requests.adapters import HTTPAdapter
from urllib3.util.retry import Retry

from core.errors import DataInputError, FetchError, UnknownIndicatorError
from core.types import MacroSeries

logger = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://api.worldbank.org/v2"

# Broad money growth, real GDP growth, CPI inflation (annual %)
DEFAULT_INDICATORS: Dict[str, str] = {
    "q": "FM.LBL.BMNY.ZG",
    "g": "NY.GDP.MKTP.KD.ZG",
    "c": "FP.CPI.TOTL.ZG",
}

ROLES = ("q", "g", "c")


def build_session(retries: int = 3, backoff_factor: float = 0.5) -> requests.Session:
    """Session that retries transient failures with exponential backoff"""
    retry = Retry(
        total=retries,
        backoff_factor=backoff_factor,
        status_forcelist=(429, 500, 502, 503, 504),
        allowed_methods=("GET",),
    )
    session = requests.Session()
    session.mount("https://", HTTPAdapter(max_retries=retry))
    session.mount("http://", HTTPAdapter(max_retries=retry))
    return session


class WorldBankClient:
    """Pages through `/country/all/indicator/<code>` JSON responses.

    Without an injected session each worker thread builds its own.
    """

    def __init__(
        self,
        base_url: str = DEFAULT_BASE_URL,
        session: Optional[requests.Session] = None,
        per_page: int = 1000,
        timeout: float = 30.0,
    ):
        self.base_url = base_url.rstrip("/")
        self._session = session
        self._local = threading.local()
        self.per_page = per_page
        self.timeout = timeout

    @property
    def session(self) -> requests.Session:
        if self._session is not None:
            return self._session
        if not hasattr(self._local, "session"):
            self._local.session = build_session()
        return self._local.session

    def fetch_indicator(self, code: str, year_range: Tuple[int, int]) -> pd.DataFrame:
        """All countries' values for one indicator as `country,period,value`"""
        url = f"{self.base_url}/country/all/indicator/{code}"
        rows: List[Dict[str, Any]] = []
        page = 1
        while True:
            response = self.session.get(
                url,
                params={
                    "format": "json",
                    "per_page": self.per_page,
                    "page": page,
                    "date": f"{year_range[0]}:{year_range[1]}",
                },
                timeout=self.timeout,
            )
            response.raise_for_status()
            payload = response.json()
            meta, records = self._unpack(code, payload)
            for record in records or []:
                country = record.get("countryiso3code") or ""
                value = record.get("value")
                if not country or value is None:
                    continue
                rows.append({"country": country, "period": int(record["date"]), "value": float(value)})
            if page >= int(meta.get("pages", 1) or 1):
                break
            page += 1

        logger.info(f"Fetched {code}: {len(rows)} values over {page} page(s)")
        return pd.DataFrame(rows, columns=["country", "period", "value"])

    @staticmethod
    def _unpack(code: str, payload: Any) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
        # errors come back as [{"message": [...]}] with HTTP 200
        if isinstance(payload, list) and payload and isinstance(payload[0], dict) and "message" in payload[0]:
            messages = payload[0]["message"]
            detail = "; ".join(str(m.get("value", m)) for m in messages) if isinstance(messages, list) else str(messages)
            raise UnknownIndicatorError(code, detail)
        if isinstance(payload, dict) and "message" in payload:
            raise UnknownIndicatorError(code, str(payload["message"]))
        if not isinstance(payload, list) or not payload or not isinstance(payload[0], dict):
            raise UnknownIndicatorError(code, "unexpected response shape")
        records = payload[1] if len(payload) > 1 else []
        return payload[0], records or []


@dataclass
class FetchResult:
    files: Dict[str, Path]  # role -> cache file
    fetched: List[str] = field(default_factory=list)
    cached: List[str] = field(default_factory=list)


def cache_path(cache_dir: Union[str, Path], code: str) -> Path:
    return Path(cache_dir) / f"{code}.csv"


def _write_indicator(frame: pd.DataFrame, role: str, path: Path):
    out = frame.rename(columns={"value": role}).sort_values(["country", "period"], kind="mergesort")
    path.parent.mkdir(parents=True, exist_ok=True)
    out.to_csv(path, index=False, float_format="%.12g", lineterminator="\n")


def fetch_worldbank(
    indicators: Optional[Dict[str, str]] = None,
    year_range: Tuple[int, int] = (1960, 2015),
    cache_dir: Union[str, Path] = ".cache/worldbank",
    client: Optional[WorldBankClient] = None,
    max_workers: Optional[int] = None,
) -> FetchResult:
    """Fetch each indicator into `<cache_dir>/<code>.csv` as `country,period,<role>`.

    Indicators already in the cache are not requested again. Missing ones
    are fetched concurrently; files are written in code order. Every
    successful download is cached before any error is raised. An unknown
    code raises UnknownIndicatorError; other failures after retries raise
    FetchError listing what is cached and what is missing.
    """
    indicators = dict(indicators or DEFAULT_INDICATORS)
    unknown_roles = sorted(set(indicators) - set(ROLES))
    if unknown_roles:
        raise DataInputError(f"unknown indicator role(s) {unknown_roles}; expected q, g, c")
    if year_range[0] > year_range[1]:
        raise DataInputError(f"year range start {year_range[0]} is after end {year_range[1]}")

    files = {role: cache_path(cache_dir, code) for role, code in indicators.items()}
    cached = sorted(code for role, code in indicators.items() if files[role].exists())
    pending = sorted((code, role) for role, code in indicators.items() if not files[role].exists())
    for code in cached:
        logger.info(f"Cache hit for {code}")
    if not pending:
        return FetchResult(files=files, cached=cached)

    client = client or WorldBankClient()
    workers = max_workers or len(pending)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {code: pool.submit(client.fetch_indicator, code, year_range) for code, _ in pending}

    fetched: List[str] = []
    failures: Dict[str, Exception] = {}
    unknown: List[UnknownIndicatorError] = []
    for code, role in pending:
        try:
            frame = futures[code].result()
        except UnknownIndicatorError as e:
            logger.error(f"Fetching {code} failed: {e}")
            unknown.append(e)
            continue
        except (requests.RequestException, ValueError) as e:
            logger.error(f"Fetching {code} failed: {e}")
            failures[code] = e
            continue
        _write_indicator(frame, role, cache_path(cache_dir, code))
        fetched.append(code)

    if unknown:
        raise unknown[0]
    if failures:
        raise FetchError(
            f"could not fetch {len(failures)} indicator(s)",
            cached=sorted(cached + fetched),
            missing=sorted(failures),
        )
    return FetchResult(files=files, fetched=fetched, cached=cached)


def merge_indicator_files(files: Dict[str, Union[str, Path]]) -> pd.DataFrame:
    """Outer-join per-indicator files into `country,period,q,g,c` sorted by country and period"""
    missing_roles = [role for role in ROLES if role not in files]
    if missing_roles:
        raise DataInputError(f"missing indicator file(s) for {', '.join(missing_roles)}")

    merged: Optional[pd.DataFrame] = None
    for role in ROLES:
        frame = pd.read_csv(files[role], dtype={"country": str})
        if list(frame.columns) != ["country", "period", role]:
            raise DataInputError(f"{files[role]}: expected columns country,period,{role}")
        merged = frame if merged is None else merged.merge(frame, on=["country", "period"], how="outer")

    assert merged is not None
    return merged.sort_values(["country", "period"], kind="mergesort").reset_index(drop=True)[
        ["country", "period", *ROLES]
    ]


@dataclass(frozen=True)
class Mismatch:
    period: Union[int, str]
    field: str
    value: float
    reference: float

    @property
    def difference(self) -> float:
        return self.value - self.reference


def cross_check(series: MacroSeries, reference: MacroSeries, tolerance_pp: float = 0.5) -> List[Mismatch]:
    """Compare overlapping periods field by field; mismatches are logged, not raised"""
    ref_by_period = {obs.period: obs for obs in reference}
    mismatches: List[Mismatch] = []
    overlap = 0
    for obs in series:
        ref = ref_by_period.get(obs.period)
        if ref is None:
            continue
        overlap += 1
        for name in ROLES:
            value, expected = getattr(obs, name), getattr(ref, name)
            if abs(value - expected) > tolerance_pp:
                mismatches.append(Mismatch(obs.period, name, value, expected))

    for m in mismatches:
        logger.warning(
            f"{series.country or 'series'} {m.period} {m.field}: {m.value:.2f} vs reference "
            f"{m.reference:.2f} (diff {m.difference:+.2f}pp)"
        )
    logger.info(f"Cross-check over {overlap} overlapping periods: {len(mismatches)} mismatch(es)")
    return mismatches
