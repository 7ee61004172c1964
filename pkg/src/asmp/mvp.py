"""Mean-velocity prediction (MVP) and the ASA-m next-period estimator."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from . import kernels
from .signal import Quantization, Sample, SamplingCondition, TargetGrid, quantize


class Trend(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


class UndefinedCorrection(ArithmeticError):
    """Correction period has a zero velocity denominator."""


class EventImminent(Exception):
    """The sampled value has reached the event threshold; no margin is left."""

    def __init__(self, margin: float):
        super().__init__(f"event margin exhausted (margin={margin})")
        self.margin = margin


@dataclass(frozen=True)
class PeriodLimit:
    """Upper/lower bounds applied to every emitted period.

    ``t_max`` is the configured constant cap (``inf`` disables it). When both
    ``event_threshold`` and ``v_event`` are set the cap also shrinks to the
    time an event-speed excursion needs to cross the remaining margin.
    """

    t_max: float = math.inf
    event_threshold: Optional[float] = None
    v_event: Optional[float] = None
    floor_period: float = 0.0

    def t_max_at(self, value: float) -> float:
        cap = self.t_max
        if self.event_threshold is not None:
            margin = self.event_threshold - value
            if margin <= 0:
                raise EventImminent(margin)
            if self.v_event:
                cap = min(cap, margin / self.v_event)
        return cap

    def pinned(self, period: float) -> "PeriodLimit":
        return PeriodLimit(t_max=period, floor_period=period)


def clamp_period(period: float, t_max: float = math.inf, floor_period: float = 0.0) -> float:
    return min(max(period, floor_period), t_max)


def event_period_cap(g_margin: float, v_event: float) -> float:
    if g_margin <= 0:
        raise EventImminent(g_margin)
    return g_margin / v_event


def mean_velocity(d_now: float, d_prev: float, rate_now: float) -> float:
    if not rate_now > 0:
        raise ValueError(f"sampling rate must be positive, got {rate_now}")
    return abs(d_now - d_prev) * rate_now


def predict_velocity(v_now: float, v_prev: float) -> float:
    return v_now + (v_now - v_prev)


def pre_post_velocities(v_prev: float, v_now: float, v_next: float) -> tuple[float, float]:
    return (v_prev + v_now) / 2, (v_now + v_next) / 2


def correction_periods(trend: Trend, r_now: float, r_prev: float, b_prime: float,
                       v_now: float, v_prev: float) -> tuple[float, float]:
    """Server correction delay and its backward counterpart, in seconds."""
    den_post = abs(3 * v_now - v_prev)
    den_pre = abs(v_now + v_prev)
    if den_post == 0 or den_pre == 0:
        raise UndefinedCorrection("zero mean velocity")
    if trend is Trend.INCREASING:
        return 2 * (b_prime - r_now) / den_post, 2 * r_prev / den_pre
    return r_now / den_post, 2 * (b_prime - r_prev) / den_pre


@dataclass(frozen=True)
class VelocityState:
    v_prev: float = 0.0
    v_now: float = 0.0
    v_next: float = 0.0

    @property
    def delta_v(self) -> float:
        return self.v_now - self.v_prev

    @property
    def v_pre(self) -> float:
        return (self.v_prev + self.v_now) / 2

    @property
    def v_post(self) -> float:
        return (self.v_now + self.v_next) / 2


@dataclass(frozen=True)
class AsaState:
    initial_rate: float
    d_prev: float = 0.0
    d_prev2: float = 0.0
    b_prev: float = 0.0
    r_prev: float = 0.0
    rate_now: float = 0.0
    rate_prev: float = 0.0
    velocity: VelocityState = field(default_factory=VelocityState)
    count: int = 0

    @classmethod
    def fresh(cls, initial_rate: float) -> "AsaState":
        if not initial_rate > 0:
            raise ValueError("initial rate must be positive")
        return cls(initial_rate=initial_rate, rate_now=initial_rate,
                   rate_prev=initial_rate)

    @property
    def bootstrapped(self) -> bool:
        return self.count >= 2

    def with_rate(self, rate: float) -> "AsaState":
        """Feed back the rate actually used for the upcoming period."""
        return replace(self, rate_now=rate)


@dataclass(frozen=True)
class RateDecision:
    next_rate: float
    next_period: float
    condition: Optional[SamplingCondition]
    q_over: int = 0
    corrected_target: float = 0.0
    server_correction_delay: Optional[float] = None
    nearest: float = 0.0
    remainder: float = 0.0
    v_now: float = 0.0
    v_next: float = 0.0
    t_pre: float = math.nan
    trend: Trend = Trend.INCREASING

    @property
    def bootstrap(self) -> bool:
        return self.condition is None

    @property
    def v_post(self) -> float:
        return (self.v_now + self.v_next) / 2


def next_rate(state: AsaState, sample: Sample, q: Quantization,
              condition: SamplingCondition, grid: TargetGrid,
              limit: PeriodLimit = PeriodLimit()) -> RateDecision:
    """Rate for the next period given an already-classified sample.

    Composed from the named MVP helpers; :func:`asa_step` uses the fused
    kernel instead and the two are checked against each other in tests.
    """
    b_prime = grid.b_prime
    v_prev = state.velocity.v_now
    v_now = mean_velocity(sample.value, state.d_prev, state.rate_now)
    v_next = predict_velocity(v_now, v_prev)
    trend = Trend.INCREASING if sample.value >= state.d_prev else Trend.DECREASING
    t_max = limit.t_max_at(sample.value)

    q_over = 0
    t_post = None
    corrected = q.nearest
    if condition is SamplingCondition.TOO_LONG:
        q_over = int(kernels.round_half_away(abs(q.nearest - state.b_prev) / b_prime))
        rate = q_over * state.rate_now
    elif condition is SamplingCondition.STABLE:
        rate = abs(v_next) / b_prime
    else:
        if trend is Trend.INCREASING:
            rate = abs(v_next) / (2 * b_prime - q.remainder)
        else:
            rate = abs(v_next) / (b_prime + q.remainder)
        try:
            t_post, _ = correction_periods(trend, q.remainder, state.r_prev, b_prime,
                                           v_now, v_prev)
        except UndefinedCorrection:
            t_post = t_max
        if math.isfinite(t_post):
            step = abs(v_next) * t_post
            if trend is Trend.DECREASING:
                step = -step
            corrected = kernels.round_to_grid(sample.value + step, b_prime)
    rate, period = kernels.clamp_rate(rate, t_max, limit.floor_period)
    return RateDecision(
        next_rate=rate, next_period=period, condition=condition, q_over=q_over,
        corrected_target=corrected, server_correction_delay=t_post,
        nearest=q.nearest, remainder=q.remainder, v_now=v_now, v_next=v_next,
        trend=trend,
    )


def asa_step(state: AsaState, sample: Sample, grid: TargetGrid,
             limit: PeriodLimit = PeriodLimit()) -> tuple[AsaState, RateDecision]:
    """Advance the ASA-m filter by one sample.

    The first two samples only prime the filter and return the initial rate;
    from the third on the MVP prediction drives the period.
    """
    t_max = limit.t_max_at(sample.value)
    if not state.bootstrapped:
        q = quantize(sample.value, grid)
        rate, period = kernels.clamp_rate(state.initial_rate, t_max, limit.floor_period)
        if state.count == 0:
            velocity = VelocityState()
        else:
            v = mean_velocity(sample.value, state.d_prev, state.rate_now)
            velocity = VelocityState(0.0, v, v)
        new_state = replace(
            state, d_prev2=state.d_prev, d_prev=sample.value, b_prev=q.nearest,
            r_prev=q.remainder, rate_prev=state.rate_now, rate_now=rate,
            velocity=velocity, count=state.count + 1,
        )
        return new_state, RateDecision(next_rate=rate, next_period=period, condition=None,
                                       corrected_target=q.nearest, nearest=q.nearest,
                                       remainder=q.remainder, v_now=velocity.v_now,
                                       v_next=velocity.v_next)

    v_prev = state.velocity.v_now
    (cond, rate, period, q_over, b_n, _b_s, r_n, v_now, v_next,
     t_post, t_pre, corrected, trend_up) = kernels.asa_core(
        float(sample.value), state.d_prev, state.b_prev, state.r_prev, state.rate_now,
        v_prev, grid.b_prime, grid.alpha, t_max, limit.floor_period)
    condition = SamplingCondition(cond)
    decision = RateDecision(
        next_rate=rate, next_period=period, condition=condition, q_over=int(q_over),
        corrected_target=corrected,
        server_correction_delay=t_post if condition is SamplingCondition.ERROR else None,
        nearest=b_n, remainder=r_n, v_now=v_now, v_next=v_next, t_pre=t_pre,
        trend=Trend.INCREASING if trend_up else Trend.DECREASING,
    )
    new_state = replace(
        state, d_prev2=state.d_prev, d_prev=sample.value, b_prev=corrected, r_prev=r_n,
        rate_prev=state.rate_now, rate_now=rate,
        velocity=VelocityState(v_prev, v_now, v_next), count=state.count + 1,
    )
    return new_state, decision
