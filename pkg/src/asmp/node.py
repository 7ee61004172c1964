"""Per-node protocol state machine: class transitions, algorithm dispatch, packets."""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from . import energy
from .casa import CasaConfig, casa_step
from .energy import EnergyLedger, OperationTally, PowerProfile
from .mvp import AsaState, EventImminent, PeriodLimit, Trend, asa_step
from .rasa import EwmaTracker, ewma_update, rasa_step
from .signal import Sample, SamplingCondition, TargetGrid

ALGORITHMS = ("fixed", "asa-m", "asa-m+casa", "asa-m+rasa", "asmp")


class NodeClass(enum.Enum):
    A = "A"
    B1 = "B1"
    B2 = "B2"
    C = "C"
    DEAD = "dead"


@dataclass(frozen=True)
class NodeConfig:
    grid: TargetGrid = field(default_factory=TargetGrid)
    casa: CasaConfig = field(default_factory=CasaConfig)
    profile: PowerProfile = field(default_factory=PowerProfile)
    limit: PeriodLimit = field(default_factory=PeriodLimit)
    initial_rate: float = 0.2
    algorithm: str = "asmp"
    L: Optional[float] = None
    max_outage: float = 43200.0
    o_m: float = 1.0
    hysteresis: float = 1.1
    decline_fraction: float = 0.8
    decline_window: int = 10
    ewma_lambda: float = 0.001
    ewma_initial: Optional[float] = None
    rasa_max_factor: int = 5
    margin_velocity: str = "event"
    e_initial: Optional[float] = None
    alarm_period: Optional[float] = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if not self.initial_rate > 0:
            raise ValueError("initial_rate must be positive")
        if self.hysteresis < 1:
            raise ValueError("hysteresis must be >= 1")
        if self.decline_window < 2:
            raise ValueError("decline_window must be >= 2")

    @property
    def threshold(self) -> float:
        if self.L is not None:
            return self.L
        f_s = self.initial_rate
        e_sp = energy.sampling_energy(self.profile, self.profile.load,
                                      max(1.0 / f_s - self.profile.wake_time, 0.0))
        return energy.energy_threshold_L(self.max_outage, self.o_m, f_s, e_sp)

    @property
    def fixed_period(self) -> float:
        return 1.0 / self.initial_rate


@dataclass(frozen=True)
class NodePacket:
    node_id: int
    sample: Sample
    class_info: str
    node_class: NodeClass
    next_expected_delay: float
    condition: Optional[SamplingCondition] = None
    v_now: float = 0.0
    v_next: float = 0.0
    correction_delay: Optional[float] = None
    predict_delay: Optional[float] = None
    base_period: Optional[float] = None
    e_r: float = 0.0
    quality: float = 0.0
    alarm: bool = False
    asa_reset: bool = False
    trend: int = 1  # +1 rising, -1 falling

    @property
    def factor(self) -> int:
        return int(self.class_info) if self.class_info not in ("A", "1") else 1


def classify(e_r: float, L: float, casa_active: bool, has_role: bool,
             current: Optional[NodeClass] = None, hysteresis: float = 1.1) -> NodeClass:
    if e_r <= 0 or current is NodeClass.DEAD:
        return NodeClass.DEAD
    if not has_role:
        return NodeClass.C
    if e_r < L or (current is NodeClass.B2 and e_r < hysteresis * L):
        return NodeClass.B2
    return NodeClass.B1 if casa_active else NodeClass.A


def _slope(values) -> float:
    n = len(values)
    xm = (n - 1) / 2
    ym = sum(values) / n
    num = sum((i - xm) * (v - ym) for i, v in enumerate(values))
    den = sum((i - xm) ** 2 for i in range(n))
    return num / den


class Node:
    """One sensor node. Single owner; the engine drives it through wakes."""

    def __init__(self, node_id: int, cfg: NodeConfig, start_time: float = 0.0):
        self.id = node_id
        self.cfg = cfg
        p = cfg.profile
        e0 = p.capacity if cfg.e_initial is None else cfg.e_initial
        self.ledger = EnergyLedger(e_initial=e0, capacity=p.capacity)
        self.tally = OperationTally()
        self.L = cfg.threshold
        self.asa = AsaState.fresh(cfg.initial_rate)
        self.tracker = EwmaTracker(cfg.ewma_lambda, cfg.ewma_initial or 0.0)
        self._ewma_primed = cfg.ewma_initial is not None
        self.node_class = NodeClass.A
        self.has_role = True
        self.index = 0
        self.quality = 0.0
        self.p_max = 500.0
        self._settled = start_time
        self._sleep_from = start_time
        self._history = deque(maxlen=cfg.decline_window)
        self._reset_pending = False
        self.alarm = False

    @property
    def alive(self) -> bool:
        return self.node_class is not NodeClass.DEAD

    # energy bookkeeping ------------------------------------------------

    def settle(self, t: float) -> None:
        """Book sleep and harvest from the last settlement up to ``t``."""
        if not self.alive or t <= self._settled:
            return
        sleep = t - max(self._settled, self._sleep_from)
        if sleep > 0:
            energy.accumulate(self.tally, self.ledger, "sl", sleep, self.cfg.profile.p_sl)
        self.ledger.harvest(self.quality * self.p_max * (t - self._settled))
        self._settled = t
        self._check_depleted()

    def _op(self, op: str, duration: float, power: float) -> None:
        energy.accumulate(self.tally, self.ledger, op, duration, power)

    def _check_depleted(self) -> None:
        if self.ledger.depleted:
            self.node_class = NodeClass.DEAD

    def forward(self, t: float, as_sync: bool) -> None:
        """Charge the forward-only work of relaying one packet at time ``t``."""
        if not self.alive or self.node_class is NodeClass.C:
            return
        self.settle(t)
        p = self.cfg.profile
        if as_sync:
            self._op("w", p.wake_time, p.p_w)
            self._op("rx", p.t_rx, p.p_rx)
            self._op("p", p.t_p, p.processing_power())
            self._op("tx", p.t_tx, p.p_tx)
            busy = p.wake_time
        else:
            self._op("rx", p.t_rx, p.p_rx)
            self._op("tx", p.t_tx, p.p_tx)
            busy = p.t_rx + p.t_tx
        self._sleep_from = max(self._sleep_from, t + busy)
        self._check_depleted()

    def park(self, t: float) -> None:
        """Drop the node's role: it sleeps until :meth:`resume`."""
        self.settle(t)
        self.has_role = False
        if self.alive:
            self.node_class = NodeClass.C

    def resume(self, t: float) -> None:
        self.settle(t)
        self.has_role = True
        if self.alive:
            self.node_class = NodeClass.A
            self.asa = AsaState.fresh(self.cfg.initial_rate)
            self._reset_pending = True
            self._history.clear()

    # protocol ---------------------------------------------------------

    def _classify(self) -> NodeClass:
        cfg = self.cfg
        e_r = self.ledger.e_r
        forced = {"asa-m": NodeClass.A, "fixed": NodeClass.A,
                  "asa-m+casa": NodeClass.B1, "asa-m+rasa": NodeClass.B2}
        if cfg.algorithm in forced:
            return forced[cfg.algorithm] if self.has_role else NodeClass.C
        self._history.append(e_r)
        declining = (e_r < cfg.decline_fraction * self.ledger.capacity
                     and len(self._history) == self._history.maxlen
                     and _slope(self._history) < 0)
        return classify(e_r, self.L, declining, self.has_role, self.node_class, cfg.hysteresis)

    def step(self, t: float, value: float, quality: float, p_max: float = 500.0):
        """Process one wake-up at time ``t``.

        Returns ``(packet, next_wake)``; both are ``None`` once the node has
        died or has no role.
        """
        self.p_max = p_max
        self.settle(t)
        if not self.alive:
            return None, None
        if not self.has_role:
            self.node_class = NodeClass.C
            return None, None
        self.e_r_at_wake = self.ledger.e_r

        p = self.cfg.profile
        self._op("w", p.wake_time, p.p_w)
        self._op("ss", p.t_ss, p.p_ss)
        self._op("p", p.t_p, p.processing_power())
        self._op("tx", p.t_tx, p.p_tx)
        self._sleep_from = t + p.wake_time
        self._check_depleted()
        if not self.alive:
            return None, None

        self.quality = quality
        p_h = quality * p_max
        if self._ewma_primed:
            self.tracker = ewma_update(self.tracker, p_h)
        else:
            self.tracker = EwmaTracker(self.cfg.ewma_lambda, p_h)
            self._ewma_primed = True

        self.node_class = self._classify()
        sample = Sample(self.index, t, value)
        self.index += 1
        packet = self._dispatch(sample)
        period = packet.next_expected_delay
        next_wake = t + period if math.isfinite(period) else None
        return packet, next_wake

    def _dispatch(self, sample: Sample) -> NodePacket:
        cfg = self.cfg
        reset = self._reset_pending
        self._reset_pending = False
        common = dict(node_id=self.id, sample=sample, node_class=self.node_class,
                      e_r=self.ledger.e_r, quality=self.quality, asa_reset=reset)
        if cfg.algorithm == "fixed":
            period = min(cfg.fixed_period, cfg.limit.t_max)
            return NodePacket(class_info="A", next_expected_delay=period, **common)

        limit = cfg.limit
        self.alarm = False
        try:
            asa, decision = asa_step(self.asa, sample, cfg.grid, limit)
        except EventImminent:
            self.alarm = True
            limit = limit.pinned(cfg.alarm_period or cfg.fixed_period)
            asa, decision = asa_step(self.asa, sample, cfg.grid, limit)

        class_info = "A"
        period = decision.next_period
        predict_delay = None
        base = None
        if self.node_class is NodeClass.B1 and not self.alarm:
            asa, casa = casa_step(asa, decision, cfg.casa, cfg.grid, limit)
            if casa.skip:
                class_info = "1"
                period = casa.casa_period
                predict_delay = casa.predict_delay
        elif self.node_class is NodeClass.B2 and not self.alarm:
            asa, rasa = rasa_step(asa, decision, self.tracker, cfg.profile, cfg.grid, limit,
                                  cfg.margin_velocity, cfg.rasa_max_factor)
            if rasa.factor > 1:
                class_info = str(rasa.factor)
                period = rasa.rasa_period
                base = rasa.base_period
        self.asa = asa
        return NodePacket(
            class_info=class_info, next_expected_delay=period,
            condition=decision.condition, v_now=decision.v_now, v_next=decision.v_next,
            correction_delay=decision.server_correction_delay,
            predict_delay=predict_delay, base_period=base, alarm=self.alarm,
            trend=1 if decision.trend is Trend.INCREASING else -1, **common,
        )
