"""Macro data ingestion and the balanced-path regression"""

from .aggregates import aggregate_panel, country_aggregates
from .fixtures import china_fixture, load_fixture
from .loader import load_panel, load_series, read_frame, select_country
from .regression import BalancedPathReport, balanced_path_regression, run_balanced_path
from .synthetic import balanced_series, synthetic_panel
from .worldbank import (
    DEFAULT_INDICATORS,
    WorldBankClient,
    cross_check,
    fetch_worldbank,
    merge_indicator_files,
)

__all__ = [
    "BalancedPathReport",
    "DEFAULT_INDICATORS",
    "WorldBankClient",
    "aggregate_panel",
    "balanced_path_regression",
    "balanced_series",
    "china_fixture",
    "country_aggregates",
    "cross_check",
    "fetch_worldbank",
    "load_fixture",
    "load_panel",
    "load_series",
    "merge_indicator_files",
    "read_frame",
    "run_balanced_path",
    "select_country",
    "synthetic_panel",
]
