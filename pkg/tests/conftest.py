"""Shared fixtures: an offline stand-in for the World Bank HTTP session, series helpers"""

import threading
from typing import Any, Dict, List, Optional

import pytest
import requests

from core.types import MacroObservation, MacroSeries


class FakeResponse:
    def __init__(self, payload: Any, status_code: int = 200):
        self.payload = payload
        self.status_code = status_code

    def json(self) -> Any:
        return self.payload

    def raise_for_status(self):
        if self.status_code >= 400:
            raise requests.HTTPError(f"{self.status_code} error")


class FakeSession:
    """Serves `data[code] = [(country, year, value), ...]` in pages of `per_page` records"""

    def __init__(
        self,
        data: Optional[Dict[str, List[tuple]]] = None,
        per_page: int = 1000,
        failing: tuple = (),
    ):
        self.data = data or {}
        self.per_page = per_page
        self.failing = set(failing)
        self.calls: List[Dict[str, Any]] = []
        self._lock = threading.Lock()

    def get(self, url: str, params: Optional[Dict[str, Any]] = None, timeout: float = 0.0) -> FakeResponse:
        params = params or {}
        code = url.rsplit("/", 1)[-1]
        with self._lock:
            self.calls.append({"url": url, "params": dict(params)})
        if code in self.failing:
            raise requests.ConnectionError(f"connection refused for {code}")
        if code not in self.data:
            return FakeResponse([{"message": [{"id": "120", "key": "Invalid value", "value": "The provided parameter value is not valid"}]}])

        rows = self.data[code]
        page = int(params.get("page", 1))
        pages = max(1, -(-len(rows) // self.per_page))
        chunk = rows[(page - 1) * self.per_page: page * self.per_page]
        records = [
            {
                "indicator": {"id": code, "value": code},
                "country": {"id": country[:2], "value": country},
                "countryiso3code": country,
                "date": str(year),
                "value": value,
            }
            for country, year, value in chunk
        ]
        meta = {"page": page, "pages": pages, "per_page": self.per_page, "total": len(rows)}
        return FakeResponse([meta, records])


@pytest.fixture
def worldbank_data() -> Dict[str, List[tuple]]:
    """Three indicators for CHN 2012-2016 and one aggregate row without a country code"""
    years = [2012, 2013, 2014, 2015, 2016]
    return {
        "FM.LBL.BMNY.ZG": [("CHN", y, v) for y, v in zip(years, [17.3, 14.8, 12.8, 11.8, 12.1])]
        + [("USA", 2015, 5.8), ("", 2015, 9.9)],
        "NY.GDP.MKTP.KD.ZG": [("CHN", y, v) for y, v in zip(years, [7.9, 7.8, 7.3, 6.9, 6.7])]
        + [("USA", 2015, 2.9)],
        "FP.CPI.TOTL.ZG": [("CHN", y, v) for y, v in zip(years, [2.6, 2.6, 2.0, 1.4, 2.0])]
        + [("USA", 2015, None)],
    }


@pytest.fixture
def fake_session(worldbank_data) -> FakeSession:
    return FakeSession(worldbank_data, per_page=3)


def reversed_series(series: MacroSeries) -> MacroSeries:
    return MacroSeries(tuple(reversed(series.observations)), country=series.country)


def scaled_series(series: MacroSeries, factor: float) -> MacroSeries:
    """Multiply q, g and c of every observation by `factor`"""
    return MacroSeries(
        tuple(MacroObservation(o.period, o.q * factor, o.g * factor, o.c * factor) for o in series),
        country=series.country,
    )
