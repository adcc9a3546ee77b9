"""Validated scenario configuration for the simulate command"""

import json
import math
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.errors import ScenarioError
from core.types import (
    ConstantSupply,
    ExponentialSupply,
    LinearSupply,
    MoneySupplySchedule,
    OutputPowerSupply,
    ScenarioParams,
    TabulatedSupply,
)


class ConstantScheduleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["constant"] = "constant"
    M0: float = Field(gt=0)

    def build(self) -> MoneySupplySchedule:
        return ConstantSupply(self.M0)


class LinearScheduleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["linear"] = "linear"
    V0: float = Field(gt=0)

    def build(self) -> MoneySupplySchedule:
        return LinearSupply(self.V0)


class ExponentialScheduleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["exponential"] = "exponential"
    M0: float = Field(gt=0)
    q: float = Field(allow_inf_nan=False)

    def build(self) -> MoneySupplySchedule:
        return ExponentialSupply(self.M0, self.q)


class OutputPowerScheduleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["output_power"] = "output_power"
    alpha: float = Field(gt=0, lt=1)

    def build(self) -> MoneySupplySchedule:
        return OutputPowerSupply(self.alpha)


class TabulatedScheduleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["tabulated"] = "tabulated"
    times: List[float] = Field(min_length=2)
    values: List[float] = Field(min_length=2)

    @model_validator(mode="after")
    def check_knots(self) -> "TabulatedScheduleConfig":
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have the same length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        if any(v <= 0 for v in self.values):
            raise ValueError("values must be strictly positive")
        return self

    def build(self) -> MoneySupplySchedule:
        return TabulatedSupply(tuple(self.times), tuple(self.values))


ScheduleConfig = Annotated[
    Union[
        ConstantScheduleConfig,
        LinearScheduleConfig,
        ExponentialScheduleConfig,
        OutputPowerScheduleConfig,
        TabulatedScheduleConfig,
    ],
    Field(discriminator="type"),
]


class ScenarioConfig(BaseModel):
    """One simulation run: schedule, model parameters and integration grid"""
    model_config = ConfigDict(extra="forbid")

    schedule: ScheduleConfig
    k: float = Field(gt=0, description="relaxation time")
    W0: float = Field(gt=0, description="initial sales value P*Y")
    Y0: float = Field(gt=0, description="initial real output")
    g: float = Field(default=0.0, allow_inf_nan=False, description="real output growth rate")
    t_end: float = Field(gt=0)
    dt: Optional[float] = Field(default=None, gt=0, description="sample spacing, default k/100")
    max_step_fraction: float = Field(default=0.01, gt=0, le=0.5)

    @field_validator("t_end")
    @classmethod
    def finite_horizon(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("t_end must be finite")
        return value

    @model_validator(mode="after")
    def check_tabulated_horizon(self) -> "ScenarioConfig":
        if isinstance(self.schedule, TabulatedScheduleConfig):
            if self.schedule.times[0] > 0 or self.schedule.times[-1] < self.t_end:
                raise ValueError(
                    f"tabulated knots cover [{self.schedule.times[0]}, {self.schedule.times[-1]}], "
                    f"t_end={self.t_end} needs [0, t_end]"
                )
        return self

    def money_supply(self) -> MoneySupplySchedule:
        return self.schedule.build()

    def params(self) -> ScenarioParams:
        return ScenarioParams(k=self.k, W0=self.W0, Y0=self.Y0, g=self.g)

    @classmethod
    def from_file(cls, path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> "ScenarioConfig":
        """Read a JSON config; non-None `overrides` replace top-level or schedule fields"""
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise ScenarioError(f"config file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ScenarioError(f"config file {path} is not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise ScenarioError(f"config file {path} must contain a JSON object")
        return cls.from_dict(data, overrides)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None) -> "ScenarioConfig":
        merged = dict(data)
        schedule = dict(merged.get("schedule") or {})
        schedule_fields = {"type", "M0", "q", "V0", "alpha", "times", "values"}
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if key in schedule_fields:
                schedule[key] = value
            else:
                merged[key] = value
        if schedule:
            merged["schedule"] = schedule
        return cls.model_validate(merged)
