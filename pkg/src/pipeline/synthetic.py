"""Seeded generators for balanced-path panels and natural-cycle series"""

import logging
from typing import Dict, Optional, Sequence

import numpy as np

from core.errors import ScenarioError
from core.types import MacroObservation, MacroSeries

logger = logging.getLogger(__name__)


def synthetic_panel(
    n: int = 161,
    slope: float = 1.0,
    sigma: float = 0.0,
    seed: Optional[int] = 0,
    years: int = 20,
    start_year: int = 1996,
    intercept: float = 0.0,
) -> Dict[str, MacroSeries]:
    """Countries whose averages satisfy log c = intercept + slope * log(q - g) + noise.

    `sigma` is the standard deviation of the Gaussian noise in log space;
    0 puts every country exactly on the line. Each country's yearly rates
    wobble around its averages with zero-sum deviations, so the means are
    the generating values.
    """
    if n < 1 or years < 1:
        raise ScenarioError(f"need n >= 1 and years >= 1, got n={n}, years={years}")
    if sigma < 0:
        raise ScenarioError(f"sigma must be non-negative, got {sigma}")

    rng = np.random.default_rng(seed)
    gaps = np.exp(rng.uniform(np.log(0.5), np.log(60.0), size=n))
    growth = rng.uniform(0.5, 7.0, size=n)
    noise = rng.normal(0.0, sigma, size=n) if sigma > 0 else np.zeros(n)
    inflation = np.exp(intercept + slope * np.log(gaps) + noise)

    width = max(3, len(str(n)))
    panel: Dict[str, MacroSeries] = {}
    for i in range(n):
        wobble = rng.normal(0.0, 1.0, size=(years, 3))
        wobble -= wobble.mean(axis=0)
        avg_g = growth[i]
        avg_q = avg_g + gaps[i]
        country = f"S{i + 1:0{width}d}"
        observations = tuple(
            MacroObservation(
                period=start_year + t,
                q=float(avg_q + wobble[t, 0]),
                g=float(avg_g + wobble[t, 1]),
                c=float(inflation[i] + wobble[t, 2]),
            )
            for t in range(years)
        )
        panel[country] = MacroSeries(observations, country=country)

    logger.info(f"Generated synthetic panel: {n} countries x {years} years, slope={slope}, sigma={sigma}, seed={seed}")
    return panel


def balanced_series(
    q: float,
    g_values: Sequence[float],
    start_period: int = 2000,
    country: Optional[str] = None,
) -> MacroSeries:
    """Series on the balanced line c = q - g with fixed money growth"""
    return MacroSeries(
        tuple(
            MacroObservation(period=start_period + i, q=float(q), g=float(g), c=float(q - g))
            for i, g in enumerate(g_values)
        ),
        country=country,
    )
