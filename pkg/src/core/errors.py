"""Exception hierarchy shared by the model, classifier, pipeline and CLI"""

from typing import Optional


class ExchangeDynamicsError(Exception):
    """Base class; `exit_code` is what the CLI returns for this failure"""
    exit_code = 1


class InputError(ExchangeDynamicsError, ValueError):
    """Bad user input: config, CSV, flags"""
    exit_code = 2


class ScenarioError(InputError):
    """Invalid scenario parameters or money-supply schedule"""


class DataInputError(InputError):
    """Malformed or inconsistent macro series input"""


class EmptySeriesError(DataInputError):
    """Input contained no usable rows"""


class TriangleError(InputError):
    """No triangle row matches the given pair"""


class UnknownIndicatorError(InputError):
    """Data provider does not know the requested indicator code"""

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        message = f"Unknown indicator code: {code}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class NumericError(ExchangeDynamicsError):
    """Numerical or domain failure during computation"""
    exit_code = 3


class StepSizeError(NumericError, ValueError):
    """Integration step does not resolve the relaxation time"""


class DomainError(NumericError):
    """A quantity left its admissible domain"""

    def __init__(self, message: str, t: Optional[float] = None):
        self.t = t
        if t is not None:
            message = f"{message} (first at t={t:.12g})"
        super().__init__(message)


class UndefinedSlopeError(NumericError):
    """Migration slope dc/dg requested with dg = 0"""


class InsufficientDataError(ExchangeDynamicsError):
    """Not enough usable points to produce a result"""
    exit_code = 4


class FetchError(ExchangeDynamicsError):
    """Remote data could not be retrieved"""
    exit_code = 4

    def __init__(self, message: str, cached: Optional[list] = None, missing: Optional[list] = None):
        self.cached = cached or []
        self.missing = missing or []
        if self.cached or self.missing:
            message += f" [cached: {', '.join(self.cached) or 'none'}; missing: {', '.join(self.missing) or 'none'}]"
        super().__init__(message)
