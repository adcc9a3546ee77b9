"""Exchange dynamics core - money supply, sales value, price and inflation"""

from .errors import (
    DataInputError,
    DomainError,
    EmptySeriesError,
    ExchangeDynamicsError,
    FetchError,
    InputError,
    InsufficientDataError,
    NumericError,
    ScenarioError,
    StepSizeError,
    TriangleError,
    UndefinedSlopeError,
    UnknownIndicatorError,
)
from .model import (
    eval_money_supply,
    inflation_path,
    integrate,
    long_run_regime,
    price_output_curve,
    price_path,
    sales_constant,
    sales_exponential,
    sales_linear,
    sales_value,
    velocity_path,
)
from .types import (
    ConstantSupply,
    ExponentialSupply,
    LinearSupply,
    MacroObservation,
    MacroSeries,
    OutputPowerSupply,
    ScenarioParams,
    TabulatedSupply,
    Thresholds,
    Trajectory,
)

__all__ = [
    "ConstantSupply",
    "DataInputError",
    "DomainError",
    "EmptySeriesError",
    "ExchangeDynamicsError",
    "ExponentialSupply",
    "FetchError",
    "InputError",
    "InsufficientDataError",
    "LinearSupply",
    "MacroObservation",
    "MacroSeries",
    "NumericError",
    "OutputPowerSupply",
    "ScenarioError",
    "ScenarioParams",
    "StepSizeError",
    "TabulatedSupply",
    "Thresholds",
    "Trajectory",
    "TriangleError",
    "UndefinedSlopeError",
    "UnknownIndicatorError",
    "eval_money_supply",
    "inflation_path",
    "integrate",
    "long_run_regime",
    "price_output_curve",
    "price_path",
    "sales_constant",
    "sales_exponential",
    "sales_linear",
    "sales_value",
    "velocity_path",
]
