"""Business-cycle classifier - labels state migrations in (g, c) space"""

import logging
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import DataInputError, UndefinedSlopeError
from core.types import (
    BehaviorLabel,
    CycleClass,
    ElasticityClass,
    MacroObservation,
    MacroSeries,
    MigrationStep,
    QDirection,
    Spectrum,
    SpectrumRun,
    Thresholds,
)
from cycles.rules import classify_money_change, detect_buffer, sensitivity_index

logger = logging.getLogger(__name__)

# (q direction, elasticity class) -> label for seesaw steps off the balanced line
SEESAW_LABELS: Dict[Tuple[QDirection, ElasticityClass], BehaviorLabel] = {
    (QDirection.UP, ElasticityClass.BELOW_MINUS_ONE): BehaviorLabel.GI,
    (QDirection.UP, ElasticityClass.BETWEEN_MINUS_ONE_AND_ZERO): BehaviorLabel.GO,
    (QDirection.DOWN, ElasticityClass.BELOW_MINUS_ONE): BehaviorLabel.LO,
    (QDirection.DOWN, ElasticityClass.BETWEEN_MINUS_ONE_AND_ZERO): BehaviorLabel.LI,
}

DEGENERATE_NOTE = "degenerate-flat"


def elasticity(prev: MacroObservation, next: MacroObservation) -> float:
    """Migration slope dc/dg between two observations"""
    dg = next.g - prev.g
    if dg == 0:
        raise UndefinedSlopeError(f"slope undefined from {prev.period} to {next.period}: dg = 0")
    return (next.c - prev.c) / dg


def _direction(delta: float, eps: float) -> QDirection:
    if delta > eps:
        return QDirection.UP
    if delta < -eps:
        return QDirection.DOWN
    return QDirection.FLAT


def classify_step(
    prev: MacroObservation,
    next: MacroObservation,
    th: Optional[Thresholds] = None,
) -> MigrationStep:
    """Classify one migration.

    A delta within `tie_eps` takes the sign of the other one, so a flat
    inflation step during falling output counts as DD. When both deltas are
    within `tie_eps` the step is degenerate and carries no label of its own.
    """
    th = th or Thresholds()
    eps = th.tie_eps
    dq, dg, dc = next.q - prev.q, next.g - prev.g, next.c - prev.c

    slope = dc / dg if dg != 0 else None
    observed_q = _direction(dq, eps)
    sensitivity = sensitivity_index(prev, th)
    money_change = classify_money_change(dq, sensitivity, th)

    common = dict(
        from_period=prev.period,
        to_period=next.period,
        dq=dq,
        dg=dg,
        dc=dc,
        elasticity=slope,
        observed_q_direction=observed_q,
        money_change=money_change,
        sensitivity=sensitivity,
    )

    if abs(dg) <= eps and abs(dc) <= eps:
        return MigrationStep(
            q_direction=None,
            elasticity_class=None,
            label=None,
            cycle_class=None,
            degenerate=True,
            **common,
        )

    sign_dg = np.sign(dg) if abs(dg) > eps else np.sign(dc)
    sign_dc = np.sign(dc) if abs(dc) > eps else sign_dg

    if sign_dg == sign_dc:
        rising = sign_dg > 0
        return MigrationStep(
            q_direction=QDirection.UP if rising else QDirection.DOWN,
            elasticity_class=ElasticityClass.POSITIVE,
            label=BehaviorLabel.DR if rising else BehaviorLabel.DD,
            cycle_class=CycleClass.SDC,
            **common,
        )

    # seesaw: |dg| > eps here, so the slope exists
    assert slope is not None
    if observed_q == QDirection.FLAT and abs(slope + 1.0) <= th.slope_delta:
        return MigrationStep(
            q_direction=QDirection.FLAT,
            elasticity_class=ElasticityClass.EQ_MINUS_ONE,
            label=BehaviorLabel.GOLDEN_GROWTH if dg > 0 else BehaviorLabel.STAGFLATION,
            cycle_class=CycleClass.ANC,
            **common,
        )

    if observed_q == QDirection.FLAT:
        # off the balanced line: the line itself moved up or down
        q_direction = QDirection.UP if (slope + 1.0) * dg > 0 else QDirection.DOWN
    else:
        q_direction = observed_q
    elasticity_class = (
        ElasticityClass.BELOW_MINUS_ONE if slope < -1.0 else ElasticityClass.BETWEEN_MINUS_ONE_AND_ZERO
    )
    return MigrationStep(
        q_direction=q_direction,
        elasticity_class=elasticity_class,
        label=SEESAW_LABELS[(q_direction, elasticity_class)],
        cycle_class=CycleClass.RNC,
        **common,
    )


def _check_periods(series: MacroSeries):
    if len(series) < 2:
        raise DataInputError(f"need at least 2 observations, got {len(series)}")
    periods = series.periods
    try:
        increasing = all(b > a for a, b in zip(periods, periods[1:]))
    except TypeError:
        raise DataInputError("periods must be mutually comparable") from None
    if not increasing:
        raise DataInputError(f"periods must be strictly increasing: {periods}")


def coarse_spectrum(
    steps: Sequence[MigrationStep],
) -> Tuple[Dict[Union[int, str], Optional[str]], List[SpectrumRun]]:
    """Per-period tags (DR, DD, RNC, ANC) and the merged runs.

    The first period takes the first step's tag, every later period the tag
    of the step ending there.
    """
    tags: Dict[Union[int, str], Optional[str]] = {}
    if not steps:
        return tags, []
    tags[steps[0].from_period] = steps[0].coarse_tag
    for step in steps:
        tags[step.to_period] = step.coarse_tag

    runs: List[SpectrumRun] = []
    previous_tag = None
    for period, tag in tags.items():
        if tag is not None and tag == previous_tag:
            runs[-1] = replace(runs[-1], end=period)
        elif tag is not None:
            runs.append(SpectrumRun(tag=tag, start=period, end=period))
        previous_tag = tag
    return tags, runs


def classify_series(series: MacroSeries, th: Optional[Thresholds] = None) -> Spectrum:
    """Classify every consecutive pair and run the buffer rule"""
    th = th or Thresholds()
    _check_periods(series)

    steps: List[MigrationStep] = []
    notes: List[str] = []
    for prev, next in zip(series.observations, series.observations[1:]):
        step = classify_step(prev, next, th)
        if step.degenerate:
            notes.append(f"{DEGENERATE_NOTE}: {step.from_period}->{step.to_period}")
            if steps:
                last = steps[-1]
                step = replace(
                    step,
                    label=last.label,
                    q_direction=last.q_direction,
                    elasticity_class=last.elasticity_class,
                    cycle_class=last.cycle_class,
                )
        steps.append(step)

    period_tags, runs = coarse_spectrum(steps)
    buffers, anomalies = detect_buffer(series, steps, th)

    counts: Dict[str, int] = {}
    for step in steps:
        if step.label is not None and not step.degenerate:
            counts[step.label.value] = counts.get(step.label.value, 0) + 1
    logger.info(
        f"Classified {len(steps)} steps"
        + (f" for {series.country}" if series.country else "")
        + f": {counts}, {len(notes)} degenerate"
    )

    return Spectrum(
        steps=steps,
        period_tags=period_tags,
        runs=runs,
        buffers=buffers,
        anomalies=anomalies,
        notes=notes,
        country=series.country,
    )


def render_spectrum_table(spectrum: Spectrum) -> str:
    """Fixed-width table of the steps followed by runs and buffer findings"""
    header = f"{'from':>6} {'to':>6} {'dq':>7} {'dg':>7} {'dc':>7} {'slope':>8}  {'label':<12} {'cycle':<5} {'money':<16}"
    lines = []
    if spectrum.country:
        lines.append(f"Country: {spectrum.country}")
    lines.extend([header, "-" * len(header)])

    for step in spectrum.steps:
        slope = f"{step.elasticity:.3f}" if step.elasticity is not None else "-"
        label = step.label.value if step.label else "-"
        if step.degenerate:
            label += "*"
        cycle = step.cycle_class.value if step.cycle_class else "-"
        lines.append(
            f"{str(step.from_period):>6} {str(step.to_period):>6} "
            f"{step.dq:>7.2f} {step.dg:>7.2f} {step.dc:>7.2f} {slope:>8}  "
            f"{label:<12} {cycle:<5} {step.money_change.value:<16}"
        )

    lines.append("")
    spans = [
        f"{run.tag} {run.start}" + (f"-{run.end}" if run.end != run.start else "")
        for run in spectrum.runs
    ]
    lines.append("Spectrum: " + (", ".join(spans) if spans else "(none)"))

    for episode in spectrum.buffers:
        buffer = ", ".join(f"{a}->{b}" for a, b in episode.buffer_steps)
        lines.append(
            f"Buffer: decrease {episode.trigger_from}->{episode.trigger_to}, "
            f"buffer [{buffer}], DD {episode.dd_from}->{episode.dd_to}"
        )
    for anomaly in spectrum.anomalies:
        lines.append(f"Anomaly: {anomaly.kind.value} at {anomaly.from_period}->{anomaly.to_period}")
    if any(step.degenerate for step in spectrum.steps):
        lines.append(f"* {DEGENERATE_NOTE}: label carried from the previous step")
    return "\n".join(lines)
