"""Per-country long-run averages for the balanced-path regression"""

import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.errors import DataInputError
from core.types import CountryAggregate, MacroSeries

logger = logging.getLogger(__name__)

DEFAULT_MIN_COVERAGE = 10


def _in_range(period, year_range: Optional[Tuple[int, int]]) -> bool:
    if year_range is None:
        return True
    if not isinstance(period, int):
        return False
    start, end = year_range
    return start <= period <= end


def aggregate_panel(
    panel: Dict[str, MacroSeries],
    year_range: Optional[Tuple[int, int]] = None,
    min_coverage: int = DEFAULT_MIN_COVERAGE,
) -> Tuple[List[CountryAggregate], List[str]]:
    """Aggregates for covered countries and the countries dropped for coverage"""
    if year_range is not None and year_range[0] > year_range[1]:
        raise DataInputError(f"year range start {year_range[0]} is after end {year_range[1]}")
    if min_coverage < 1:
        raise DataInputError(f"min_coverage must be at least 1, got {min_coverage}")

    aggregates: List[CountryAggregate] = []
    excluded: List[str] = []
    for country in sorted(panel):
        rows = [obs for obs in panel[country] if _in_range(obs.period, year_range)]
        if len(rows) < min_coverage:
            excluded.append(country)
            continue
        values = np.array([[obs.q, obs.g, obs.c] for obs in rows], dtype=float)
        avg_q, avg_g, avg_c = values.mean(axis=0)
        aggregates.append(CountryAggregate(
            country=country,
            avg_q=float(avg_q),
            avg_g=float(avg_g),
            avg_c=float(avg_c),
            n_years=len(rows),
        ))

    if excluded:
        logger.info(f"{len(excluded)} countries below {min_coverage} covered years excluded")
    return aggregates, excluded


def country_aggregates(
    panel: Dict[str, MacroSeries],
    year_range: Optional[Tuple[int, int]] = None,
    min_coverage: int = DEFAULT_MIN_COVERAGE,
) -> List[CountryAggregate]:
    """Arithmetic means of q, g and c per country, sorted by country.

    Observations are complete triples by construction, so every covered year
    counts towards all three means.
    """
    return aggregate_panel(panel, year_range, min_coverage)[0]
