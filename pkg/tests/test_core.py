"""Tests for core types and the error hierarchy"""

import math

import numpy as np
import pandas as pd
import pytest

from core.errors import (
    DataInputError,
    DomainError,
    ExchangeDynamicsError,
    FetchError,
    InputError,
    InsufficientDataError,
    NumericError,
    ScenarioError,
    StepSizeError,
    TriangleError,
    UnknownIndicatorError,
)
from core.types import (
    ConstantSupply,
    ExponentialSupply,
    LinearSupply,
    MacroObservation,
    MacroSeries,
    OutputPowerSupply,
    ScenarioParams,
    ScheduleType,
    TabulatedSupply,
    Thresholds,
    Trajectory,
)

from conftest import reversed_series, scaled_series


class TestSchedules:
    def test_schedule_types(self):
        assert ConstantSupply(100.0).type == ScheduleType.CONSTANT
        assert LinearSupply(2.0).type == ScheduleType.LINEAR
        assert ExponentialSupply(100.0, 0.1).type == ScheduleType.EXPONENTIAL
        assert OutputPowerSupply(0.5).type == ScheduleType.OUTPUT_POWER
        assert TabulatedSupply((0, 1), (1, 2)).type == ScheduleType.TABULATED

    @pytest.mark.parametrize("factory", [
        lambda: ConstantSupply(0.0),
        lambda: LinearSupply(-1.0),
        lambda: ExponentialSupply(-5.0, 0.1),
        lambda: ExponentialSupply(5.0, math.inf),
        lambda: OutputPowerSupply(1.0),
        lambda: OutputPowerSupply(0.0),
        lambda: TabulatedSupply((0.0,), (1.0,)),
        lambda: TabulatedSupply((0.0, 1.0), (1.0,)),
        lambda: TabulatedSupply((0.0, 0.0), (1.0, 2.0)),
        lambda: TabulatedSupply((0.0, 1.0), (1.0, 0.0)),
    ])
    def test_invalid_schedules_rejected(self, factory):
        with pytest.raises(ScenarioError):
            factory()

    def test_tabulated_bounds(self):
        schedule = TabulatedSupply([0, 5, 10], [1, 2, 3])
        assert schedule.times == (0.0, 5.0, 10.0)
        assert schedule.t_min == 0.0
        assert schedule.t_max == 10.0


class TestScenarioParams:
    def test_output_growth(self):
        params = ScenarioParams(k=1.0, W0=50.0, Y0=10.0, g=0.03)
        assert params.output(0.0) == pytest.approx(10.0)
        assert params.output(10.0) == pytest.approx(10.0 * math.exp(0.3))

    def test_zero_initial_sales_allowed(self):
        assert ScenarioParams(k=1.0, W0=0.0, Y0=1.0).W0 == 0.0

    @pytest.mark.parametrize("kwargs", [
        {"k": 0.0, "W0": 1.0, "Y0": 1.0},
        {"k": 1.0, "W0": -1.0, "Y0": 1.0},
        {"k": 1.0, "W0": 1.0, "Y0": 0.0},
        {"k": 1.0, "W0": 1.0, "Y0": 1.0, "g": math.nan},
    ])
    def test_invalid_params(self, kwargs):
        with pytest.raises(ScenarioError):
            ScenarioParams(**kwargs)


class TestTrajectory:
    def _trajectory(self):
        t = np.array([0.0, 0.5, 1.0])
        W = np.array([1.0, 2.0, 3.0])
        return Trajectory(t=t, M=W, W=W, P=W, Y=np.ones(3), c=np.zeros(3), v=np.ones(3))

    def test_arrays_are_read_only(self):
        trajectory = self._trajectory()
        with pytest.raises(ValueError):
            trajectory.W[0] = 10.0

    def test_rejects_non_increasing_time(self):
        with pytest.raises(ValueError):
            Trajectory(
                t=np.array([0.0, 0.0]), M=np.ones(2), W=np.ones(2), P=np.ones(2),
                Y=np.ones(2), c=np.zeros(2), v=np.ones(2),
            )

    def test_csv_columns(self, tmp_path):
        path = self._trajectory().to_csv(tmp_path / "nested" / "trajectory.csv")
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["t", "M", "W", "P", "Y", "c", "v"]
        assert frame["W"].tolist() == [1.0, 2.0, 3.0]

    def test_final(self):
        assert self._trajectory().final()["W"] == 3.0


class TestMacroSeries:
    def test_non_finite_rate_rejected(self):
        with pytest.raises(DataInputError):
            MacroObservation(period=2000, q=math.nan, g=1.0, c=1.0)

    def test_series_helpers(self):
        series = MacroSeries(
            (MacroObservation(2000, 10.0, 5.0, 2.0), MacroObservation(2001, 12.0, 4.0, 3.0)),
            country="XYZ",
        )
        scaled = scaled_series(series, 2.0)
        assert scaled[1].q == 24.0
        assert scaled.country == "XYZ"
        assert reversed_series(series).periods == [2001, 2000]
        assert list(series.to_frame().columns) == ["country", "period", "q", "g", "c"]


class TestThresholds:
    def test_defaults(self):
        th = Thresholds()
        assert (th.evident_up, th.evident_down, th.sensitivity_ratio, th.sensitive_trigger) == (3.0, 4.0, 0.35, 1.0)
        assert th.max_buffer_steps == 2

    def test_from_config_fills_defaults(self):
        th = Thresholds.from_config({"evident_up": 2.5})
        assert th.evident_up == 2.5
        assert th.evident_down == 4.0
        assert Thresholds.from_config(th.to_dict()) == th

    def test_zero_tie_eps_allowed(self):
        assert Thresholds(tie_eps=0.0).tie_eps == 0.0

    @pytest.mark.parametrize("kwargs", [
        {"evident_up": 0.0},
        {"sensitivity_ratio": -0.1},
        {"tie_eps": -0.01},
        {"max_buffer_steps": 0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ScenarioError):
            Thresholds(**kwargs)


class TestErrors:
    @pytest.mark.parametrize("error,code", [
        (ScenarioError("x"), 2),
        (DataInputError("x"), 2),
        (TriangleError("x"), 2),
        (UnknownIndicatorError("BAD.CODE"), 2),
        (StepSizeError("x"), 3),
        (DomainError("x"), 3),
        (InsufficientDataError("x"), 4),
        (FetchError("x"), 4),
    ])
    def test_exit_codes(self, error, code):
        assert isinstance(error, ExchangeDynamicsError)
        assert error.exit_code == code

    def test_input_errors_are_value_errors(self):
        assert issubclass(InputError, ValueError)
        assert issubclass(StepSizeError, NumericError)

    def test_domain_error_reports_time(self):
        error = DomainError("W left the domain", t=1.5)
        assert error.t == 1.5
        assert "t=1.5" in str(error)

    def test_unknown_indicator_names_code(self):
        assert "BAD.CODE" in str(UnknownIndicatorError("BAD.CODE", "not valid"))

    def test_fetch_error_lists_partial_state(self):
        error = FetchError("failed", cached=["A"], missing=["B"])
        assert error.missing == ["B"]
        assert "cached: A" in str(error)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
