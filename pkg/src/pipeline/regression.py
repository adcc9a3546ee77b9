"""Balanced-path regression: log average inflation on log(money growth - output growth)"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats

from core.errors import InsufficientDataError
from core.types import CountryAggregate, MacroSeries, RegressionResult
from pipeline.aggregates import DEFAULT_MIN_COVERAGE, aggregate_panel

logger = logging.getLogger(__name__)

MIN_POINTS = 3

SCATTER_COLUMNS = ("country", "n_years", "avg_q", "avg_g", "avg_c", "gap", "log_gap", "log_c", "used")


def _usable(aggregate: CountryAggregate) -> bool:
    return aggregate.avg_c > 0 and aggregate.gap > 0


def balanced_path_regression(aggregates: Sequence[CountryAggregate]) -> RegressionResult:
    """Ordinary least squares of log(avg_c) on log(avg_q - avg_g).

    Countries outside the log domain (avg_c <= 0 or gap <= 0) are excluded
    and listed in the result.
    """
    used = [a for a in aggregates if _usable(a)]
    excluded = tuple(a.country for a in aggregates if not _usable(a))
    if excluded:
        logger.info(f"Excluded {len(excluded)} countries outside the log domain")
    if len(used) < MIN_POINTS:
        raise InsufficientDataError(
            f"need at least {MIN_POINTS} countries with positive inflation and gap, got {len(used)}"
        )

    x = np.log([a.gap for a in used])
    y = np.log([a.avg_c for a in used])
    if np.ptp(x) == 0:
        raise InsufficientDataError("all countries share the same money-output gap; slope undefined")

    fit = stats.linregress(x, y)
    result = RegressionResult(
        slope=float(fit.slope),
        stderr=float(fit.stderr),
        correlation=float(fit.rvalue),
        intercept=float(fit.intercept),
        n_points=len(used),
        excluded_positivity=excluded,
    )
    logger.info(
        f"Balanced-path fit over {result.n_points} countries: slope={result.slope:.4f} "
        f"(stderr {result.stderr:.4f}), r={result.correlation:.3f}"
    )
    return result


@dataclass
class BalancedPathReport:
    """Regression plus everything needed to plot and audit it"""
    regression: RegressionResult
    aggregates: List[CountryAggregate]
    excluded_coverage: List[str] = field(default_factory=list)
    year_range: Optional[Tuple[int, int]] = None
    min_coverage: int = DEFAULT_MIN_COVERAGE

    @property
    def n_input(self) -> int:
        return len(self.aggregates) + len(self.excluded_coverage)

    @property
    def excluded_positivity(self) -> List[str]:
        return list(self.regression.excluded_positivity)

    def scatter_frame(self) -> pd.DataFrame:
        rows = []
        for a in self.aggregates:
            usable = _usable(a)
            rows.append({
                "country": a.country,
                "n_years": a.n_years,
                "avg_q": a.avg_q,
                "avg_g": a.avg_g,
                "avg_c": a.avg_c,
                "gap": a.gap,
                "log_gap": math.log(a.gap) if usable else float("nan"),
                "log_c": math.log(a.avg_c) if usable else float("nan"),
                "used": usable,
            })
        return pd.DataFrame(rows, columns=list(SCATTER_COLUMNS))

    def write_scatter(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.scatter_frame().to_csv(path, index=False, float_format="%.12g", lineterminator="\n")
        return path

    def to_dict(self) -> Dict[str, Any]:
        return {
            **self.regression.to_dict(),
            "year_range": list(self.year_range) if self.year_range else None,
            "min_coverage": self.min_coverage,
            "n_input": self.n_input,
            "n_used": self.regression.n_points,
            "n_excluded_positivity": len(self.excluded_positivity),
            "n_excluded_coverage": len(self.excluded_coverage),
            "excluded_coverage": list(self.excluded_coverage),
        }


def run_balanced_path(
    panel: Dict[str, MacroSeries],
    year_range: Optional[Tuple[int, int]] = None,
    min_coverage: int = DEFAULT_MIN_COVERAGE,
) -> BalancedPathReport:
    """Aggregate a panel, fit the balanced path and account for every country"""
    aggregates, excluded_coverage = aggregate_panel(panel, year_range, min_coverage)
    regression = balanced_path_regression(aggregates)
    report = BalancedPathReport(
        regression=regression,
        aggregates=aggregates,
        excluded_coverage=excluded_coverage,
        year_range=year_range,
        min_coverage=min_coverage,
    )
    return report
