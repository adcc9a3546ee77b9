"""Business-cycle classification in (output growth, inflation) space"""

from .classifier import (
    classify_series,
    classify_step,
    coarse_spectrum,
    elasticity,
    render_spectrum_table,
)
from .rules import classify_money_change, detect_buffer, sensitivity_index
from .triangle import TRIANGLE_ROWS, classify_elasticity, resolve_triangle

__all__ = [
    "TRIANGLE_ROWS",
    "classify_elasticity",
    "classify_money_change",
    "classify_series",
    "classify_step",
    "coarse_spectrum",
    "detect_buffer",
    "elasticity",
    "render_spectrum_table",
    "resolve_triangle",
    "sensitivity_index",
]
