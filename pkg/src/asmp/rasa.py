"""Energy-recovery period extension (RASA)."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from . import kernels
from .energy import PowerProfile
from .mvp import AsaState, PeriodLimit, RateDecision, Trend
from .signal import TargetGrid

N_SEARCH_CAP = 10**6


@dataclass(frozen=True)
class EwmaTracker:
    lam: float = 0.001
    mean: float = 0.0

    def __post_init__(self):
        if not 0 < self.lam <= 1:
            raise ValueError(f"EWMA weight must lie in (0, 1], got {self.lam}")
        if self.mean < 0:
            raise ValueError("mean harvest power must be non-negative")


def ewma_update(tracker: EwmaTracker, p_h: float) -> EwmaTracker:
    if p_h < 0:
        raise ValueError(f"harvest power must be non-negative, got {p_h}")
    return replace(tracker, mean=tracker.lam * p_h + (1 - tracker.lam) * tracker.mean)


def recovery_numerator(profile: PowerProfile, load: float) -> float:
    """Energy a wake costs above plain sleeping, per sampling process (mJ)."""
    p = profile
    return ((p.p_w - p.p_sl) * p.wake_time + p.p_ss * p.t_ss
            + p.processing_power(load) * p.t_p + p.p_tx * p.t_tx)


def min_rasa_factor(profile: PowerProfile, load: float, mean_harvest: float,
                    base_period: float) -> Optional[int]:
    """Smallest period multiplier that makes harvest outpace consumption.

    Returns ``None`` when no multiplier works (mean harvest at or below the
    sleep power, or a bound beyond ``N_SEARCH_CAP``).
    """
    if not base_period > 0:
        raise ValueError("base_period must be positive")
    n = kernels.rasa_factor_k(recovery_numerator(profile, load), float(mean_harvest),
                              profile.p_sl, float(base_period), float(N_SEARCH_CAP))
    return None if n == kernels.UNSATISFIABLE else int(n)


@dataclass(frozen=True)
class RasaDecision:
    factor: int
    rasa_period: float
    base_period: float
    corrected_target: float
    satisfiable: bool = True

    @property
    def prediction_count(self) -> int:
        return self.factor - 1


def rasa_step(asa: AsaState, decision: RateDecision, tracker: EwmaTracker,
              profile: PowerProfile, grid: TargetGrid, limit: PeriodLimit = PeriodLimit(),
              margin_velocity: str = "event", max_factor: int = 5) -> tuple[AsaState, RasaDecision]:
    """Stretch the ASA-m period by the recovery multiplier.

    ``asa`` is the filter state right after :func:`asa_step`. The multiplier
    is the minimal one from :func:`min_rasa_factor`, then reduced until the
    stretched period respects the period cap. ``margin_velocity`` picks the
    excursion speed used against the event margin: ``"event"`` (the
    configured event speed, already folded into ``limit``) or
    ``"predicted"`` (the current predicted velocity).

    Raises :class:`~asmp.mvp.EventImminent` when the value already sits at
    the event threshold.
    """
    value = asa.d_prev
    base = decision.next_period
    t_max = limit.t_max_at(value)
    if margin_velocity == "predicted" and limit.event_threshold is not None:
        speed = abs(decision.v_next)
        if speed > 0:
            t_max = min(t_max, (limit.event_threshold - value) / speed)
    elif margin_velocity != "event":
        raise ValueError(f"unknown margin velocity mode {margin_velocity!r}")

    if not math.isfinite(base):
        return asa, RasaDecision(1, base, base, decision.corrected_target)

    n = min_rasa_factor(profile, profile.load, tracker.mean, base)
    satisfiable = n is not None
    if n is None:
        n = max_factor if math.isinf(t_max) else max(int(t_max // base), 1)
    while n > 1 and n * base > t_max:
        n -= 1

    if n == 1:
        return asa, RasaDecision(1, base, base, decision.corrected_target, satisfiable)
    period = n * base
    step = abs(decision.v_next) * (n - 1) * base
    if decision.trend is Trend.DECREASING:
        step = -step
    corrected = kernels.round_to_grid(value + step, grid.b_prime)
    new_asa = replace(asa, b_prev=corrected, rate_now=1.0 / period)
    return new_asa, RasaDecision(n, period, base, corrected, satisfiable)
