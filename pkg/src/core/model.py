"""Dynamical quantity equation of exchange.

The money supply M(t) acts as a carrying capacity for the sales value
W = P * Y, which relaxes towards it with characteristic time k:

    k * dW/dt = M(t) - W

Real output follows Y(t) = Y0 * exp(g t), so the price level is W / Y and
inflation is d(ln P)/dt.
"""

import logging
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np

from core.errors import DomainError, ScenarioError, StepSizeError
from core.types import (
    CLOSED_FORM_SCHEDULES,
    ConstantSupply,
    DemandRegime,
    ExponentialSupply,
    InflationBranch,
    InflationSign,
    LinearSupply,
    LongRunRegime,
    MoneySupplySchedule,
    OutputPowerSupply,
    PriceOutputCurve,
    ScenarioParams,
    TabulatedSupply,
    Trajectory,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

# |1 + k q| at or below this is treated as the resonance k q = -1
RESONANCE_TOL = 1e-12

DEFAULT_STEPS_PER_K = 100


def _scalar_or_array(values: np.ndarray, t: ArrayLike):
    return float(values) if np.ndim(t) == 0 else values


def is_resonant(q: float, k: float) -> bool:
    return abs(1.0 + k * q) <= RESONANCE_TOL


# ---------------------------------------------------------------------------
# Money supply
# ---------------------------------------------------------------------------

def eval_money_supply(
    schedule: MoneySupplySchedule,
    t: ArrayLike,
    w_current: Optional[ArrayLike] = None,
):
    """Evaluate M(t). The output-power schedule needs the current sales value."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ScenarioError(f"money supply is defined for t >= 0, got t={np.min(t_arr):.12g}")

    if isinstance(schedule, ConstantSupply):
        values = np.full(t_arr.shape, schedule.M0)
    elif isinstance(schedule, LinearSupply):
        values = schedule.V0 * t_arr
    elif isinstance(schedule, ExponentialSupply):
        values = schedule.M0 * np.exp(schedule.q * t_arr)
    elif isinstance(schedule, OutputPowerSupply):
        if w_current is None:
            raise ScenarioError("output-power schedule needs the current sales value w_current")
        w_arr = np.asarray(w_current, dtype=float)
        if np.any(w_arr <= 0):
            raise DomainError("output-power supply needs a positive sales value")
        values = np.power(w_arr, schedule.alpha) * np.ones(t_arr.shape)
        if np.ndim(t) == 0 and np.ndim(w_current) == 0:
            return float(values)
        return values
    elif isinstance(schedule, TabulatedSupply):
        lo, hi = np.min(t_arr), np.max(t_arr)
        if lo < schedule.t_min or hi > schedule.t_max:
            bad = lo if lo < schedule.t_min else hi
            raise DomainError(
                f"tabulated supply covers [{schedule.t_min:.12g}, {schedule.t_max:.12g}]; no extrapolation",
                t=float(bad),
            )
        values = np.interp(t_arr, schedule.times, schedule.values)
    else:
        raise ScenarioError(f"unsupported schedule: {schedule!r}")

    return _scalar_or_array(values, t)


def _money_at(schedule: MoneySupplySchedule) -> Callable[[float, float], float]:
    """Scalar M(t, w) for the integrator's inner loop"""
    if isinstance(schedule, ConstantSupply):
        M0 = schedule.M0
        return lambda t, w: M0
    if isinstance(schedule, LinearSupply):
        V0 = schedule.V0
        return lambda t, w: V0 * t
    if isinstance(schedule, ExponentialSupply):
        M0, q = schedule.M0, schedule.q
        return lambda t, w: M0 * math.exp(q * t)
    if isinstance(schedule, OutputPowerSupply):
        alpha = schedule.alpha

        def feedback(t: float, w: float) -> float:
            if not w > 0:
                raise DomainError("sales value left the positive domain", t=t)
            return w ** alpha
        return feedback
    if isinstance(schedule, TabulatedSupply):
        times, values = schedule.times, schedule.values
        return lambda t, w: float(np.interp(t, times, values))
    raise ScenarioError(f"unsupported schedule: {schedule!r}")


def _fastest_rate(schedule: MoneySupplySchedule, params: ScenarioParams) -> float:
    """Largest rate (1/time) the integrator must resolve"""
    rate = 1.0 / params.k
    if isinstance(schedule, ExponentialSupply):
        rate = max(rate, abs(schedule.q))
    elif isinstance(schedule, TabulatedSupply):
        log_m = np.log(schedule.values)
        seg_rates = np.abs(np.diff(log_m) / np.diff(schedule.times))
        rate = max(rate, float(np.max(seg_rates)))
    return rate


# ---------------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------------

def integrate(
    schedule: MoneySupplySchedule,
    params: ScenarioParams,
    t_end: float,
    dt: Optional[float] = None,
    max_step_fraction: float = 0.01,
) -> Trajectory:
    """Integrate k dW/dt = M(t) - W from W(0) = W0 with fixed-step RK4.

    Samples are spaced `dt` apart (default k/100, capped at t_end). Each
    sample interval is split into equal sub-steps so that sub-step * fastest
    rate stays at or below `max_step_fraction`.
    """
    if not t_end > 0:
        raise ScenarioError(f"t_end must be positive, got {t_end}")
    if dt is None:
        dt = min(params.k / DEFAULT_STEPS_PER_K, t_end)
    if not 0 < dt <= t_end:
        raise ScenarioError(f"dt must satisfy 0 < dt <= t_end, got dt={dt}, t_end={t_end}")
    if dt > params.k / 2:
        raise StepSizeError(
            f"step dt={dt:.6g} exceeds k/2={params.k / 2:.6g}; the relaxation time is not resolved"
        )
    if not max_step_fraction > 0:
        raise ScenarioError(f"max_step_fraction must be positive, got {max_step_fraction}")
    if not params.W0 > 0:
        raise DomainError("initial sales value W0 must be positive to define a price", t=0.0)
    if isinstance(schedule, TabulatedSupply) and (schedule.t_min > 0 or schedule.t_max < t_end):
        raise ScenarioError(
            f"tabulated supply covers [{schedule.t_min:.12g}, {schedule.t_max:.12g}], "
            f"integration needs [0, {t_end:.12g}]"
        )

    n_out = max(1, int(math.ceil(t_end / dt - 1e-9)))
    t_grid = np.linspace(0.0, t_end, n_out + 1)
    h_out = t_end / n_out
    substeps = max(1, int(math.ceil(h_out * _fastest_rate(schedule, params) / max_step_fraction - 1e-9)))
    h = h_out / substeps

    money = _money_at(schedule)
    k = params.k

    def rhs(t: float, w: float) -> float:
        return (money(t, w) - w) / k

    W = np.empty(n_out + 1)
    W[0] = w = float(params.W0)
    for i in range(n_out):
        t0 = float(t_grid[i])
        for j in range(substeps):
            tj = t0 + j * h
            k1 = rhs(tj, w)
            k2 = rhs(tj + 0.5 * h, w + 0.5 * h * k1)
            k3 = rhs(tj + 0.5 * h, w + 0.5 * h * k2)
            k4 = rhs(tj + h, w + h * k3)
            w = w + h * (k1 + 2.0 * (k2 + k3) + k4) / 6.0
        if not (w > 0 and math.isfinite(w)):
            raise DomainError("sales value W left the positive domain", t=float(t_grid[i + 1]))
        W[i + 1] = w

    if isinstance(schedule, OutputPowerSupply):
        M = np.power(W, schedule.alpha)
    else:
        M = np.asarray(eval_money_supply(schedule, t_grid), dtype=float)
    Y = params.output(t_grid)
    P = W / Y
    with np.errstate(divide="ignore"):
        # linear supply has M(0) = 0
        v = W / M
    c = np.gradient(np.log(P), t_grid, edge_order=2 if len(t_grid) > 2 else 1)

    logger.info(
        f"Integrated {schedule.type.value} schedule to t={t_end:g}: "
        f"{n_out} samples, {substeps} sub-steps each, W(end)={W[-1]:.6g}"
    )
    return Trajectory(t=t_grid, M=M, W=W, P=P, Y=Y, c=c, v=v)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def sales_constant(M0: float, params: ScenarioParams, t: ArrayLike):
    """W(t) = M0 + (W0 - M0) exp(-t/k)"""
    if not M0 > 0:
        raise ScenarioError(f"M0 must be positive, got {M0}")
    t_arr = np.asarray(t, dtype=float)
    values = M0 + (params.W0 - M0) * np.exp(-t_arr / params.k)
    return _scalar_or_array(values, t)


def sales_linear(V0: float, params: ScenarioParams, t: ArrayLike):
    """W(t) = V0 (t - k) + (k V0 + W0) exp(-t/k)"""
    if not V0 > 0:
        raise ScenarioError(f"V0 must be positive, got {V0}")
    k = params.k
    t_arr = np.asarray(t, dtype=float)
    values = V0 * (t_arr - k) + (k * V0 + params.W0) * np.exp(-t_arr / k)
    return _scalar_or_array(values, t)


def sales_exponential(M0: float, q: float, params: ScenarioParams, t: ArrayLike):
    """W(t) = [M0 exp(q t) + exp(-t/k) (W0 + k q W0 - M0)] / (1 + k q).

    At k q = -1 the limit W(t) = exp(-t/k) (W0 + M0 t / k) is used. Close to
    it, where (q + 1/k) t is small, the same expression is evaluated as
    exp(-t/k) (W0 + M0 expm1((q + 1/k) t) / (1 + k q)).
    """
    if not M0 > 0:
        raise ScenarioError(f"M0 must be positive, got {M0}")
    k, W0 = params.k, params.W0
    t_arr = np.asarray(t, dtype=float)
    if is_resonant(q, k):
        values = np.exp(-t_arr / k) * (W0 + M0 * t_arr / k)
    else:
        s = 1.0 + k * q
        x = (q + 1.0 / k) * t_arr
        near = np.abs(x) < 1.0
        with np.errstate(over="ignore", invalid="ignore"):
            direct = (M0 * np.exp(q * t_arr) + np.exp(-t_arr / k) * (W0 * s - M0)) / s
            # the direct form cancels when |x| is small
            close = np.exp(-t_arr / k) * (W0 + M0 * np.expm1(np.where(near, x, 0.0)) / s)
        values = np.where(near, close, direct)
    return _scalar_or_array(values, t)


def sales_value(schedule: MoneySupplySchedule, params: ScenarioParams, t: ArrayLike):
    """Closed-form W(t) for the constant, linear and exponential schedules"""
    if isinstance(schedule, ConstantSupply):
        return sales_constant(schedule.M0, params, t)
    if isinstance(schedule, LinearSupply):
        return sales_linear(schedule.V0, params, t)
    if isinstance(schedule, ExponentialSupply):
        return sales_exponential(schedule.M0, schedule.q, params, t)
    raise ScenarioError(f"{schedule.type.value} schedule has no closed form; integrate it instead")


def velocity_path(schedule: MoneySupplySchedule, params: ScenarioParams, t: ArrayLike):
    """v = W/M from the closed forms"""
    W = np.asarray(sales_value(schedule, params, t), dtype=float)
    M = np.asarray(eval_money_supply(schedule, t), dtype=float)
    with np.errstate(divide="ignore"):
        values = W / M
    return _scalar_or_array(values, t)


def _integrated_on(schedule: MoneySupplySchedule, params: ScenarioParams, t_grid: np.ndarray) -> Trajectory:
    t_end = float(np.max(t_grid))
    if not t_end > 0:
        raise ScenarioError("time grid must reach beyond t=0")
    dt = min(params.k / DEFAULT_STEPS_PER_K, t_end)
    return integrate(schedule, params, t_end, dt)


# ---------------------------------------------------------------------------
# Price and inflation
# ---------------------------------------------------------------------------

def price_path(
    source: Union[Trajectory, MoneySupplySchedule],
    params: ScenarioParams,
    t: Optional[ArrayLike] = None,
):
    """P(t) = W(t) / (Y0 exp(g t)) from a trajectory or a schedule.

    Schedules with a closed form are evaluated exactly; the others are
    integrated and interpolated onto `t`.
    """
    if isinstance(source, Trajectory):
        if t is None:
            return source.W / params.output(source.t)
        t_arr = np.asarray(t, dtype=float)
        W = np.interp(t_arr, source.t, source.W)
        return _scalar_or_array(W / params.output(t_arr), t)

    if t is None:
        raise ScenarioError("price_path needs a time grid when given a schedule")
    t_arr = np.asarray(t, dtype=float)
    if isinstance(source, CLOSED_FORM_SCHEDULES):
        W = np.asarray(sales_value(source, params, t_arr), dtype=float)
    else:
        trajectory = _integrated_on(source, params, np.atleast_1d(t_arr))
        W = np.interp(t_arr, trajectory.t, trajectory.W)
    return _scalar_or_array(W / params.output(t_arr), t)


def inflation_exponential(M0: float, q: float, params: ScenarioParams, t: ArrayLike):
    """Exact d(ln P)/dt for the exponential schedule.

        c = q - g + (1 + kq)(M0 - W0 - kqW0) / (k[(exp((q + 1/k) t) - 1) M0 + W0 + kqW0])

    The growth rate inside the exponential is q + 1/k; exp(.) - 1 goes
    through expm1 so the formula stays continuous into the resonance.
    """
    k, W0, g = params.k, params.W0, params.g
    t_arr = np.asarray(t, dtype=float)
    if is_resonant(q, k):
        denom = k * W0 + M0 * t_arr
        if np.any(denom == 0):
            raise DomainError("inflation undefined where W = 0")
        values = -g - 1.0 / k + M0 / denom
        return _scalar_or_array(values, t)

    s = 1.0 + k * q
    with np.errstate(over="ignore"):
        denom = k * (np.expm1((q + 1.0 / k) * t_arr) * M0 + W0 * s)
    if np.any(denom == 0):
        raise DomainError("inflation undefined where W = 0")
    with np.errstate(invalid="ignore"):
        values = q - g + s * (M0 - W0 * s) / denom
    return _scalar_or_array(values, t)


def inflation_constant(M0: float, params: ScenarioParams, t: ArrayLike):
    """c = -g + (M0 - W0) / (k M0 exp(t/k) - k (M0 - W0)), written in exp(-t/k)"""
    k, W0, g = params.k, params.W0, params.g
    t_arr = np.asarray(t, dtype=float)
    decay = np.exp(-t_arr / k)
    denom = k * (M0 + (W0 - M0) * decay)
    if np.any(denom == 0):
        raise DomainError("inflation undefined where W = 0")
    values = -g + (M0 - W0) * decay / denom
    return _scalar_or_array(values, t)


def inflation_linear(V0: float, params: ScenarioParams, t: ArrayLike):
    """c = W'/W - g with W' = V0 - (k V0 + W0) exp(-t/k) / k"""
    k, W0, g = params.k, params.W0, params.g
    t_arr = np.asarray(t, dtype=float)
    decay = np.exp(-t_arr / k)
    W = V0 * (t_arr - k) + (k * V0 + W0) * decay
    if np.any(W <= 0):
        raise DomainError("inflation undefined where W <= 0")
    W_prime = V0 - (k * V0 + W0) * decay / k
    values = W_prime / W - g
    return _scalar_or_array(values, t)


def inflation_path(schedule: MoneySupplySchedule, params: ScenarioParams, t_grid: ArrayLike):
    """c(t) = d(ln P)/dt.

    Exact derivatives for the closed-form schedules; finite differences on an
    integrated trajectory, interpolated onto `t_grid`, for the others.
    """
    t_arr = np.asarray(t_grid, dtype=float)
    if t_arr.ndim == 1 and np.any(np.diff(t_arr) <= 0):
        raise ScenarioError("t_grid must be strictly increasing")

    if isinstance(schedule, ConstantSupply):
        return inflation_constant(schedule.M0, params, t_grid)
    if isinstance(schedule, LinearSupply):
        return inflation_linear(schedule.V0, params, t_grid)
    if isinstance(schedule, ExponentialSupply):
        return inflation_exponential(schedule.M0, schedule.q, params, t_grid)

    trajectory = _integrated_on(schedule, params, np.atleast_1d(t_arr))
    values = np.interp(t_arr, trajectory.t, trajectory.c)
    return _scalar_or_array(values, t_grid)


# ---------------------------------------------------------------------------
# Long-run behaviour
# ---------------------------------------------------------------------------

def _sign_of(c_inf: float) -> InflationSign:
    if c_inf > 0:
        return InflationSign.INFLATION
    if c_inf < 0:
        return InflationSign.DEFLATION
    return InflationSign.NEUTRAL


def long_run_regime(schedule: MoneySupplySchedule, params: ScenarioParams) -> LongRunRegime:
    """Asymptotic inflation branch and velocity"""
    k, g = params.k, params.g

    if isinstance(schedule, ExponentialSupply):
        q = schedule.q
        if is_resonant(q, k):
            c_inf, branch, v_inf = -g - 1.0 / k, InflationBranch.RESONANCE, None
        elif q > -1.0 / k:
            c_inf, branch, v_inf = q - g, InflationBranch.TYPICAL, 1.0 / (1.0 + k * q)
        else:
            c_inf, branch, v_inf = -g - 1.0 / k, InflationBranch.DISORDERED, None
    elif isinstance(schedule, (ConstantSupply, LinearSupply, OutputPowerSupply)):
        c_inf, branch, v_inf = -g, InflationBranch.SEESAW, 1.0
    else:
        raise ScenarioError(f"{schedule.type.value} schedule has no long-run regime")

    # -0.0 from -g with g = 0
    c_inf = c_inf + 0.0
    return LongRunRegime(c_inf=c_inf, branch=branch, v_inf=v_inf, sign=_sign_of(c_inf))


def price_output_curve(
    M0: float,
    q: float,
    params: ScenarioParams,
    y_grid: ArrayLike,
) -> PriceOutputCurve:
    """Price as a function of real output under exponential money supply.

        P(Y) = [M0 (Y/Y0)^(q/|g|) + (W0 - M0 + kqW0) (Y0/Y)^(1/(|g|k))] / ((1 + kq) Y)

    Eliminating t through Y = Y0 exp(g t) reproduces price_path exactly for
    g > 0. The demand regime is rigid when q > |g| (price rises with output
    at large Y) and elastic when q < |g|.
    """
    k, W0, Y0, g = params.k, params.W0, params.Y0, params.g
    if g == 0:
        raise DomainError("price-output curve needs g != 0")
    if not M0 > 0:
        raise ScenarioError(f"M0 must be positive, got {M0}")
    if is_resonant(q, k):
        raise DomainError("price-output curve is singular at k q = -1")
    if q < -1.0 / k:
        logger.warning(f"q={q} < -1/k={-1.0 / k:.6g}: the money-driven term no longer dominates at large Y")

    y = np.asarray(y_grid, dtype=float)
    if np.any(y <= 0):
        raise DomainError("output grid must be positive")

    ag = abs(g)
    s = 1.0 + k * q
    p = (M0 * (y / Y0) ** (q / ag) + (W0 * s - M0) * (Y0 / y) ** (1.0 / (ag * k))) / (s * y)

    if math.isclose(q, ag, rel_tol=1e-12, abs_tol=1e-15):
        regime = DemandRegime.BOUNDARY
    elif q > ag:
        regime = DemandRegime.RIGID
    else:
        regime = DemandRegime.ELASTIC

    tail = int(np.sign(p[-1] - p[-2])) if p.size >= 2 else 0
    return PriceOutputCurve(y=y, p=p, regime=regime, tail_slope_sign=tail)
