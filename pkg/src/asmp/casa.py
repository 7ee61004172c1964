"""Linear-trend detection and one-sample skipping (CASA)."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from . import kernels
from .mvp import AsaState, PeriodLimit, RateDecision, Trend, VelocityState
from .signal import TargetGrid


@dataclass(frozen=True)
class CasaConfig:
    epsilon: float = 0.3

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")


@dataclass(frozen=True)
class CasaDecision:
    skip: bool
    casa_period: float
    predict_delay: float
    threshold: float
    v_after_next: Optional[float] = None
    corrected_target: Optional[float] = None


def casa_threshold(v_now: float, epsilon: float) -> float:
    return abs(epsilon * v_now / 2)


def casa_eligible(v_now: float, v_prev: float, threshold: float) -> bool:
    dv = abs(v_now - v_prev)
    return 0 < dv < threshold


def casa_step(asa: AsaState, decision: RateDecision, cfg: CasaConfig, grid: TargetGrid,
              limit: PeriodLimit = PeriodLimit()) -> tuple[AsaState, CasaDecision]:
    """Try to stretch the ASA-m period over one extra target.

    ``asa`` is the filter state right after :func:`asa_step` produced
    ``decision``. On a skip the returned state carries the skipped target as
    the previous target, the advanced velocity and the stretched rate.
    """
    vel = asa.velocity
    m = casa_threshold(vel.v_now, cfg.epsilon)
    no_skip = CasaDecision(False, decision.next_period, decision.next_period, m)
    if decision.bootstrap or not casa_eligible(vel.v_now, vel.v_prev, m):
        return asa, no_skip

    v_after = vel.v_next + (vel.v_now - vel.v_prev)
    if v_after == 0:
        return asa, no_skip
    t1 = decision.next_period
    t2 = grid.b_prime / abs(v_after)
    period = t1 + t2
    if period > limit.t_max_at(asa.d_prev):
        # a truncated skip would desync the server's prediction time
        return asa, no_skip

    step = abs(v_after) * t1
    if decision.trend is Trend.DECREASING:
        step = -step
    corrected = kernels.round_to_grid(asa.d_prev + step, grid.b_prime)
    new_asa = replace(asa, b_prev=corrected, rate_now=1.0 / period,
                      velocity=VelocityState(vel.v_prev, vel.v_now, v_after))
    return new_asa, CasaDecision(True, period, t1, m, v_after, corrected)
