"""Sensitivity and buffer rules applied on top of a classified series"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

from core.errors import DataInputError
from core.types import (
    AnomalyKind,
    BehaviorLabel,
    BufferAnomaly,
    BufferEpisode,
    CycleClass,
    MacroObservation,
    MacroSeries,
    MigrationStep,
    MoneyChange,
    SensitivityFlag,
    SensitivityResult,
    Thresholds,
)

logger = logging.getLogger(__name__)

# Steps that may sit between an evident decrease and the double drop
BUFFER_CYCLES = (CycleClass.RNC, CycleClass.ANC)


def sensitivity_index(obs: MacroObservation, th: Optional[Thresholds] = None) -> SensitivityResult:
    """How far money growth sits above output growth, q/g - 1.

    Below `sensitivity_ratio` inflation reacts to small money-growth changes.
    Undefined (flag unknown) when g <= 0.
    """
    th = th or Thresholds()
    if obs.g <= 0:
        return SensitivityResult(value=None, flag=SensitivityFlag.UNKNOWN)
    value = obs.q / obs.g - 1.0
    flag = SensitivityFlag.SENSITIVE if value < th.sensitivity_ratio else SensitivityFlag.INSENSITIVE
    return SensitivityResult(value=value, flag=flag)


def classify_money_change(
    dq: float,
    sensitive: Union[bool, SensitivityFlag, SensitivityResult],
    th: Optional[Thresholds] = None,
) -> MoneyChange:
    """Grade a money-growth change in percentage points.

    In the sensitive zone `sensitive_trigger` already counts as evident in
    either direction. Elsewhere rises need `evident_up` and falls need
    `evident_down`; changes of at least `sensitive_trigger` short of those
    are slight.
    """
    th = th or Thresholds()
    if isinstance(sensitive, SensitivityResult):
        sensitive = sensitive.sensitive
    elif isinstance(sensitive, SensitivityFlag):
        sensitive = sensitive == SensitivityFlag.SENSITIVE

    if sensitive:
        if dq >= th.sensitive_trigger:
            return MoneyChange.EVIDENT_INCREASE
        if dq <= -th.sensitive_trigger:
            return MoneyChange.EVIDENT_DECREASE
        return MoneyChange.NONE

    if dq >= th.evident_up:
        return MoneyChange.EVIDENT_INCREASE
    if dq <= -th.evident_down:
        return MoneyChange.EVIDENT_DECREASE
    if abs(dq) >= th.sensitive_trigger:
        return MoneyChange.SLIGHT
    return MoneyChange.NONE


def _is_dd(step: MigrationStep) -> bool:
    return step.label == BehaviorLabel.DD and not step.degenerate


def detect_buffer(
    series: MacroSeries,
    steps: Sequence[MigrationStep],
    th: Optional[Thresholds] = None,
) -> Tuple[List[BufferEpisode], List[BufferAnomaly]]:
    """Pair evident money-growth decreases with the double drop that follows.

    From each trigger step (inclusive) the scan walks over natural-cycle and
    degenerate steps, which form the buffer, until it meets a strong driving
    step. A DR abandons the trigger. A DD closes an episode when 1 to
    `max_buffer_steps` buffer steps preceded it. No buffer is sought before
    a DR.
    """
    th = th or Thresholds()
    if len(series) != len(steps) + 1:
        raise DataInputError(
            f"series has {len(series)} observations but {len(steps)} steps were given"
        )

    episodes: List[BufferEpisode] = []
    anomalies: List[Tuple[int, BufferAnomaly]] = []
    explained = set()
    last_dd = -1

    for i, trigger in enumerate(steps):
        if trigger.money_change != MoneyChange.EVIDENT_DECREASE or i <= last_dd:
            continue

        buffer: List[int] = []
        for j in range(i, len(steps)):
            step = steps[j]
            if step.degenerate or step.cycle_class in BUFFER_CYCLES:
                buffer.append(j)
                continue
            if step.label == BehaviorLabel.DR:
                logger.info(f"Trigger {trigger.from_period}->{trigger.to_period} abandoned at DR {step.from_period}->{step.to_period}")
                break
            # strong driving step that is not DR: the double drop
            explained.add(j)
            last_dd = j
            if not buffer:
                anomalies.append((j, BufferAnomaly(
                    kind=AnomalyKind.DD_WITHOUT_BUFFER,
                    from_period=step.from_period,
                    to_period=step.to_period,
                    message=f"DD follows the decrease at {trigger.from_period}->{trigger.to_period} with no buffer",
                )))
            elif len(buffer) > th.max_buffer_steps:
                anomalies.append((j, BufferAnomaly(
                    kind=AnomalyKind.BUFFER_TOO_LONG,
                    from_period=step.from_period,
                    to_period=step.to_period,
                    message=f"{len(buffer)} buffer steps before DD, limit is {th.max_buffer_steps}",
                )))
            else:
                episodes.append(BufferEpisode(
                    trigger_from=trigger.from_period,
                    trigger_to=trigger.to_period,
                    buffer_steps=tuple((steps[b].from_period, steps[b].to_period) for b in buffer),
                    dd_from=step.from_period,
                    dd_to=step.to_period,
                ))
            break

    for j, step in enumerate(steps):
        run_start = _is_dd(step) and (j == 0 or steps[j - 1].label != BehaviorLabel.DD)
        if run_start and j not in explained:
            anomalies.append((j, BufferAnomaly(
                kind=AnomalyKind.DD_WITHOUT_TRIGGER,
                from_period=step.from_period,
                to_period=step.to_period,
                message="DD run starts without a preceding evident money-growth decrease",
            )))

    anomalies.sort(key=lambda pair: pair[0])
    for _, anomaly in anomalies:
        logger.warning(f"Buffer anomaly {anomaly.kind.value} at {anomaly.from_period}->{anomaly.to_period}: {anomaly.message}")
    logger.info(f"Detected {len(episodes)} buffer episode(s), {len(anomalies)} anomaly(ies)")
    return episodes, [anomaly for _, anomaly in anomalies]
