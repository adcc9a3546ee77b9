"""Triangular relationship between money growth, migration slope and behavior.

Any two of (money-growth direction, elasticity class, behavior) determine
the third. Elasticity classes follow the signed reading of the slope dc/dg:
exactly -1 on the balanced line, below -1, between -1 and 0, positive.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Union

from core.errors import TriangleError
from core.types import BehaviorLabel, ElasticityClass, QDirection

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TriangleRow:
    q_direction: QDirection
    elasticity_class: ElasticityClass
    behavior: BehaviorLabel
    dg_direction: Optional[QDirection] = None  # required output-growth direction, if any


TRIANGLE_ROWS: List[TriangleRow] = [
    TriangleRow(QDirection.FLAT, ElasticityClass.EQ_MINUS_ONE, BehaviorLabel.GOLDEN_GROWTH, QDirection.UP),
    TriangleRow(QDirection.FLAT, ElasticityClass.EQ_MINUS_ONE, BehaviorLabel.STAGFLATION, QDirection.DOWN),
    TriangleRow(QDirection.UP, ElasticityClass.BELOW_MINUS_ONE, BehaviorLabel.GI),
    TriangleRow(QDirection.UP, ElasticityClass.BETWEEN_MINUS_ONE_AND_ZERO, BehaviorLabel.GO),
    TriangleRow(QDirection.DOWN, ElasticityClass.BELOW_MINUS_ONE, BehaviorLabel.LO),
    TriangleRow(QDirection.DOWN, ElasticityClass.BETWEEN_MINUS_ONE_AND_ZERO, BehaviorLabel.LI),
    TriangleRow(QDirection.UP, ElasticityClass.POSITIVE, BehaviorLabel.DR, QDirection.UP),
    TriangleRow(QDirection.DOWN, ElasticityClass.POSITIVE, BehaviorLabel.DD, QDirection.DOWN),
]

ANC_BEHAVIORS = (BehaviorLabel.GOLDEN_GROWTH, BehaviorLabel.STAGFLATION)

TriangleValue = Union[QDirection, ElasticityClass, BehaviorLabel]


def classify_elasticity(slope: float, slope_delta: float = 0.0, near_balanced: bool = False) -> ElasticityClass:
    """Map a numeric slope dc/dg to its class.

    With `near_balanced` (flat money growth) slopes within `slope_delta` of -1
    count as -1. Otherwise -1 itself falls between -1 and 0, the same side the
    step classifier puts it on.
    """
    if slope > 0:
        return ElasticityClass.POSITIVE
    if near_balanced and abs(slope + 1.0) <= slope_delta:
        return ElasticityClass.EQ_MINUS_ONE
    if slope < -1.0:
        return ElasticityClass.BELOW_MINUS_ONE
    return ElasticityClass.BETWEEN_MINUS_ONE_AND_ZERO


def _coerce(value, enum_cls, name: str):
    if value is None or isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(member.value for member in enum_cls)
        raise TriangleError(f"unknown {name} {value!r}; expected one of: {choices}") from None


def resolve_triangle(
    q_direction: Optional[Union[QDirection, str]] = None,
    elasticity: Optional[Union[ElasticityClass, str, float]] = None,
    behavior: Optional[Union[BehaviorLabel, str]] = None,
    dg_direction: Optional[Union[QDirection, str]] = None,
    slope_delta: float = 0.1,
) -> TriangleValue:
    """Return the missing element given exactly two of the three.

    `elasticity` may be a class or a numeric slope. `dg_direction` separates
    golden growth from stagflation when only (flat, -1) is known.
    """
    q_direction = _coerce(q_direction, QDirection, "q direction")
    behavior = _coerce(behavior, BehaviorLabel, "behavior")
    dg_direction = _coerce(dg_direction, QDirection, "output-growth direction")

    if isinstance(elasticity, (int, float)) and not isinstance(elasticity, bool):
        near = q_direction == QDirection.FLAT or behavior in ANC_BEHAVIORS
        elasticity_class = classify_elasticity(float(elasticity), slope_delta, near_balanced=near)
    else:
        elasticity_class = _coerce(elasticity, ElasticityClass, "elasticity class")

    known = [x is not None for x in (q_direction, elasticity_class, behavior)]
    if sum(known) != 2:
        raise TriangleError(f"give exactly two of q direction, elasticity and behavior (got {sum(known)})")

    rows = [
        row for row in TRIANGLE_ROWS
        if (q_direction is None or row.q_direction == q_direction)
        and (elasticity_class is None or row.elasticity_class == elasticity_class)
        and (behavior is None or row.behavior == behavior)
        and (dg_direction is None or row.dg_direction is None or row.dg_direction == dg_direction)
    ]
    described = ", ".join(
        f"{name}={value.value}"
        for name, value in (
            ("q", q_direction),
            ("elasticity", elasticity_class),
            ("behavior", behavior),
            ("dg", dg_direction),
        )
        if value is not None
    )
    if not rows:
        raise TriangleError(f"no matching row for {described}")
    if len(rows) > 1:
        raise TriangleError(f"ambiguous for {described}; give the output-growth direction")

    row = rows[0]
    logger.debug(f"Resolved {described} -> {row.behavior.value}")
    if behavior is None:
        return row.behavior
    if elasticity_class is None:
        return row.elasticity_class
    return row.q_direction
