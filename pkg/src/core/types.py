"""Core data types for exchange-dynamics"""

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from core.errors import DataInputError, ScenarioError


# ---------------------------------------------------------------------------
# Money supply schedules
# ---------------------------------------------------------------------------

class ScheduleType(str, Enum):
    """Shapes of the money supply M(t)"""
    CONSTANT = "constant"          # M(t) = M0
    LINEAR = "linear"              # M(t) = V0 * t
    EXPONENTIAL = "exponential"    # M(t) = M0 * exp(q t)
    OUTPUT_POWER = "output_power"  # M(t) = (P Y)^alpha, feedback on sales value
    TABULATED = "tabulated"        # piecewise linear through knots


@dataclass(frozen=True)
class ConstantSupply:
    M0: float
    type: ScheduleType = field(default=ScheduleType.CONSTANT, init=False)

    def __post_init__(self):
        if not self.M0 > 0:
            raise ScenarioError(f"constant schedule needs M0 > 0, got {self.M0}")


@dataclass(frozen=True)
class LinearSupply:
    V0: float
    type: ScheduleType = field(default=ScheduleType.LINEAR, init=False)

    def __post_init__(self):
        if not self.V0 > 0:
            raise ScenarioError(f"linear schedule needs V0 > 0, got {self.V0}")


@dataclass(frozen=True)
class ExponentialSupply:
    M0: float
    q: float
    type: ScheduleType = field(default=ScheduleType.EXPONENTIAL, init=False)

    def __post_init__(self):
        if not self.M0 > 0:
            raise ScenarioError(f"exponential schedule needs M0 > 0, got {self.M0}")
        if not math.isfinite(self.q):
            raise ScenarioError(f"exponential schedule needs a finite q, got {self.q}")


@dataclass(frozen=True)
class OutputPowerSupply:
    alpha: float
    type: ScheduleType = field(default=ScheduleType.OUTPUT_POWER, init=False)

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ScenarioError(f"output-power schedule needs 0 < alpha < 1, got {self.alpha}")


@dataclass(frozen=True)
class TabulatedSupply:
    """Money supply replayed from data; no extrapolation outside the knots"""
    times: Tuple[float, ...]
    values: Tuple[float, ...]
    type: ScheduleType = field(default=ScheduleType.TABULATED, init=False)

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.times) != len(self.values):
            raise ScenarioError("tabulated schedule needs as many values as times")
        if len(self.times) < 2:
            raise ScenarioError("tabulated schedule needs at least 2 knots")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ScenarioError("tabulated schedule times must be strictly increasing")
        if any(not v > 0 for v in self.values):
            raise ScenarioError("tabulated schedule values must be strictly positive")

    @property
    def t_min(self) -> float:
        return self.times[0]

    @property
    def t_max(self) -> float:
        return self.times[-1]


MoneySupplySchedule = Union[
    ConstantSupply, LinearSupply, ExponentialSupply, OutputPowerSupply, TabulatedSupply
]

CLOSED_FORM_SCHEDULES = (ConstantSupply, LinearSupply, ExponentialSupply)


@dataclass(frozen=True)
class ScenarioParams:
    """Relaxation constant, initial sales value and output, output growth.

    W0 = 0 is accepted so the closed forms can be evaluated from an empty
    start; `integrate` still requires W0 > 0 because P must stay positive.
    """
    k: float
    W0: float
    Y0: float
    g: float = 0.0

    def __post_init__(self):
        if not self.k > 0:
            raise ScenarioError(f"k must be positive, got {self.k}")
        if not self.W0 >= 0:
            raise ScenarioError(f"W0 must be non-negative, got {self.W0}")
        if not self.Y0 > 0:
            raise ScenarioError(f"Y0 must be positive, got {self.Y0}")
        if not math.isfinite(self.g):
            raise ScenarioError(f"g must be finite, got {self.g}")

    def output(self, t):
        """Real output Y0 * exp(g t)"""
        return self.Y0 * np.exp(self.g * np.asarray(t, dtype=float))


# ---------------------------------------------------------------------------
# Simulation results
# ---------------------------------------------------------------------------

TRAJECTORY_COLUMNS = ("t", "M", "W", "P", "Y", "c", "v")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the dynamical quantity equation.

    Arrays are made read-only on construction.
    """
    t: np.ndarray
    M: np.ndarray
    W: np.ndarray
    P: np.ndarray
    Y: np.ndarray
    c: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        for name in TRAJECTORY_COLUMNS:
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"trajectory column {name} has shape {arr.shape}, expected ({n},)")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if n < 2 or np.any(np.diff(self.t) <= 0):
            raise ValueError("trajectory times must be strictly increasing with at least 2 samples")

    def __len__(self) -> int:
        return len(self.t)

    def final(self) -> Dict[str, float]:
        return {name: float(getattr(self, name)[-1]) for name in TRAJECTORY_COLUMNS}

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({name: getattr(self, name) for name in TRAJECTORY_COLUMNS})

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write `t,M,W,P,Y,c,v` with 12 significant digits"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.12g", lineterminator="\n")
        return path


class InflationBranch(str, Enum):
    """Long-run inflation branches"""
    TYPICAL = "typical"        # c = q - g, exponential with q > -1/k
    DISORDERED = "disordered"  # c = -g - 1/k, exponential with q < -1/k
    SEESAW = "seesaw"          # c = -g, non-exponential schedules
    RESONANCE = "resonance"    # k q = -1


class InflationSign(str, Enum):
    INFLATION = "inflation"
    DEFLATION = "deflation"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class LongRunRegime:
    c_inf: float
    branch: InflationBranch
    v_inf: Optional[float]
    sign: InflationSign

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c_inf": self.c_inf,
            "branch": self.branch.value,
            "v_inf": self.v_inf,
            "sign": self.sign.value,
        }


class DemandRegime(str, Enum):
    RIGID = "rigid"        # price rises with output at large Y
    ELASTIC = "elastic"    # price falls with output at large Y
    BOUNDARY = "boundary"  # q == |g|


@dataclass(frozen=True)
class PriceOutputCurve:
    y: np.ndarray
    p: np.ndarray
    regime: DemandRegime
    tail_slope_sign: int  # sign of dP/dY at the largest grid point


# ---------------------------------------------------------------------------
# Business-cycle classification
# ---------------------------------------------------------------------------

class BehaviorLabel(str, Enum):
    """The eight behaviors of the business cycle"""
    GOLDEN_GROWTH = "GoldenGrowth"
    STAGFLATION = "Stagflation"
    GI = "GI"  # greater inflation
    GO = "GO"  # greater output
    LI = "LI"  # less inflation
    LO = "LO"  # less output
    DD = "DD"  # double drop
    DR = "DR"  # double rise


class CycleClass(str, Enum):
    ANC = "ANC"  # absolute natural cycle, q constant
    RNC = "RNC"  # relative natural cycle, seesaw persists
    SDC = "SDC"  # strong driving cycle, DD or DR


class QDirection(str, Enum):
    UP = "up"
    DOWN = "down"
    FLAT = "flat"


class ElasticityClass(str, Enum):
    EQ_MINUS_ONE = "eq_minus_one"
    BELOW_MINUS_ONE = "below_minus_one"
    BETWEEN_MINUS_ONE_AND_ZERO = "between_minus_one_and_zero"
    POSITIVE = "positive"


class MoneyChange(str, Enum):
    EVIDENT_INCREASE = "evident_increase"
    EVIDENT_DECREASE = "evident_decrease"
    SLIGHT = "slight"
    NONE = "none"


class SensitivityFlag(str, Enum):
    SENSITIVE = "sensitive"
    INSENSITIVE = "insensitive"
    UNKNOWN = "unknown"  # g <= 0, ratio undefined


@dataclass(frozen=True)
class MacroObservation:
    """One annual observation, rates in percent per year"""
    period: Union[int, str]
    q: float  # money growth
    g: float  # real output growth
    c: float  # inflation

    def __post_init__(self):
        for name in ("q", "g", "c"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DataInputError(f"observation {self.period}: {name} must be finite, got {value!r}")


@dataclass(frozen=True)
class MacroSeries:
    observations: Tuple[MacroObservation, ...]
    country: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "observations", tuple(self.observations))

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self) -> Iterator[MacroObservation]:
        return iter(self.observations)

    def __getitem__(self, index: int) -> MacroObservation:
        return self.observations[index]

    @property
    def periods(self) -> List[Union[int, str]]:
        return [obs.period for obs in self.observations]

    def to_frame(self) -> pd.DataFrame:
        rows = [{"period": o.period, "q": o.q, "g": o.g, "c": o.c} for o in self.observations]
        frame = pd.DataFrame(rows, columns=["period", "q", "g", "c"])
        if self.country is not None:
            frame.insert(0, "country", self.country)
        return frame


@dataclass(frozen=True)
class Thresholds:
    """Classifier thresholds; pp = percentage points.

    The defaults are the empirical values reported for China; they are
    parameters, not laws.
    """
    evident_up: float = 3.0
    evident_down: float = 4.0
    sensitivity_ratio: float = 0.35
    sensitive_trigger: float = 1.0
    tie_eps: float = 0.05
    slope_delta: float = 0.1
    max_buffer_steps: int = 2

    def __post_init__(self):
        for name in ("evident_up", "evident_down", "sensitivity_ratio", "sensitive_trigger", "slope_delta"):
            if not getattr(self, name) > 0:
                raise ScenarioError(f"threshold {name} must be positive, got {getattr(self, name)}")
        # 0 switches tie handling off (exact comparisons)
        if not self.tie_eps >= 0:
            raise ScenarioError(f"threshold tie_eps must be non-negative, got {self.tie_eps}")
        if self.max_buffer_steps < 1:
            raise ScenarioError(f"max_buffer_steps must be at least 1, got {self.max_buffer_steps}")

    @classmethod
    def from_config(cls, config: Optional[Dict[str, Any]] = None) -> "Thresholds":
        config = config or {}
        defaults = cls()
        return cls(
            evident_up=config.get("evident_up", defaults.evident_up),
            evident_down=config.get("evident_down", defaults.evident_down),
            sensitivity_ratio=config.get("sensitivity_ratio", defaults.sensitivity_ratio),
            sensitive_trigger=config.get("sensitive_trigger", defaults.sensitive_trigger),
            tie_eps=config.get("tie_eps", defaults.tie_eps),
            slope_delta=config.get("slope_delta", defaults.slope_delta),
            max_buffer_steps=config.get("max_buffer_steps", defaults.max_buffer_steps),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "evident_up": self.evident_up,
            "evident_down": self.evident_down,
            "sensitivity_ratio": self.sensitivity_ratio,
            "sensitive_trigger": self.sensitive_trigger,
            "tie_eps": self.tie_eps,
            "slope_delta": self.slope_delta,
            "max_buffer_steps": self.max_buffer_steps,
        }


@dataclass(frozen=True)
class SensitivityResult:
    value: Optional[float]  # q/g - 1, None when g <= 0
    flag: SensitivityFlag

    @property
    def sensitive(self) -> bool:
        return self.flag == SensitivityFlag.SENSITIVE


@dataclass(frozen=True)
class MigrationStep:
    """One state migration in (g, c) space.

    `q_direction` is the money-growth direction of the matching triangle row:
    observed for natural-cycle moves, implied by the label for DD/DR and for
    off-slope moves with flat money growth. The raw direction is kept in
    `observed_q_direction`.
    """
    from_period: Union[int, str]
    to_period: Union[int, str]
    dq: float
    dg: float
    dc: float
    elasticity: Optional[float]
    q_direction: Optional[QDirection]
    observed_q_direction: QDirection
    elasticity_class: Optional[ElasticityClass]
    label: Optional[BehaviorLabel]
    cycle_class: Optional[CycleClass]
    money_change: MoneyChange
    sensitivity: SensitivityResult
    degenerate: bool = False

    @property
    def coarse_tag(self) -> Optional[str]:
        """DR / DD for strong driving steps, otherwise the cycle class"""
        if self.cycle_class == CycleClass.SDC and self.label is not None:
            return self.label.value
        return self.cycle_class.value if self.cycle_class else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "from": self.from_period,
            "to": self.to_period,
            "dq": self.dq,
            "dg": self.dg,
            "dc": self.dc,
            "elasticity": self.elasticity,
            "label": self.label.value if self.label else None,
            "cycle_class": self.cycle_class.value if self.cycle_class else None,
            "q_direction": self.q_direction.value if self.q_direction else None,
            "observed_q_direction": self.observed_q_direction.value,
            "elasticity_class": self.elasticity_class.value if self.elasticity_class else None,
            "money_change": self.money_change.value,
            "sensitivity": self.sensitivity.value,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class BufferEpisode:
    trigger_from: Union[int, str]
    trigger_to: Union[int, str]
    buffer_steps: Tuple[Tuple[Union[int, str], Union[int, str]], ...]
    dd_from: Union[int, str]
    dd_to: Union[int, str]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trigger": [self.trigger_from, self.trigger_to],
            "buffer_steps": [list(s) for s in self.buffer_steps],
            "dd": [self.dd_from, self.dd_to],
        }


class AnomalyKind(str, Enum):
    DD_WITHOUT_TRIGGER = "dd_without_trigger"
    DD_WITHOUT_BUFFER = "dd_without_buffer"
    BUFFER_TOO_LONG = "buffer_too_long"


@dataclass(frozen=True)
class BufferAnomaly:
    kind: AnomalyKind
    from_period: Union[int, str]
    to_period: Union[int, str]
    message: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "from": self.from_period,
            "to": self.to_period,
            "message": self.message,
        }


@dataclass(frozen=True)
class SpectrumRun:
    tag: str
    start: Union[int, str]
    end: Union[int, str]


@dataclass
class Spectrum:
    """Classified series: steps, coarse period tags, buffer analysis"""
    steps: List[MigrationStep]
    period_tags: Dict[Union[int, str], Optional[str]] = field(default_factory=dict)
    runs: List[SpectrumRun] = field(default_factory=list)
    buffers: List[BufferEpisode] = field(default_factory=list)
    anomalies: List[BufferAnomaly] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    country: Optional[str] = None

    @property
    def labels(self) -> List[BehaviorLabel]:
        return [s.label for s in self.steps if s.label is not None and not s.degenerate]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "country": self.country,
            "steps": [s.to_dict() for s in self.steps],
            "labels": [label.value for label in self.labels],
            "period_tags": [{"period": p, "tag": t} for p, t in self.period_tags.items()],
            "runs": [{"tag": r.tag, "start": r.start, "end": r.end} for r in self.runs],
            "buffers": [b.to_dict() for b in self.buffers],
            "anomalies": [a.to_dict() for a in self.anomalies],
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# Balanced-path regression
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CountryAggregate:
    country: str
    avg_q: float
    avg_g: float
    avg_c: float
    n_years: int

    @property
    def gap(self) -> float:
        """avg_q - avg_g, the balanced-path prediction for avg_c"""
        return self.avg_q - self.avg_g


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    stderr: float
    correlation: float
    intercept: float
    n_points: int
    excluded_positivity: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slope": self.slope,
            "stderr": self.stderr,
            "correlation": self.correlation,
            "intercept": self.intercept,
            "n_points": self.n_points,
            "excluded_positivity": list(self.excluded_positivity),
        }
