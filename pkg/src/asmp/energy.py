"""Per-operation energy accounting.

Units are milliwatts, seconds and millijoules throughout; reports convert to
mWh with :func:`mj_to_mwh`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields
from typing import Optional

MJ_PER_MWH = 3600.0

# fixed summation order for the ledger; never reorder
OPS = ("sl", "w", "p", "ss", "rx", "tx")


class Mode(enum.Enum):
    SLEEP = "sleep"
    EDGE = "edge"
    RELAY_SAMPLING = "relay-sampling"
    RELAY_FORWARD = "relay-forward"
    SYNC_SAMPLING = "sync-sampling"
    SYNC_FORWARD = "sync-forward"


def mj_to_mwh(mj: float) -> float:
    return mj / MJ_PER_MWH


@dataclass(frozen=True)
class PowerProfile:
    p_sl: float = 0.0003
    p_w: float = 3.5
    p_ss: float = 7.5
    p_rx: float = 9.2
    p_tx: float = 11.6
    proc_a: float = 0.5
    proc_b: float = 2.7
    t_ss: float = 0.0014
    t_p: float = 0.010
    t_rx: float = 0.0025
    t_tx: float = 0.0025
    t_w: Optional[float] = None  # defaults to t_ss + t_p + t_tx
    load: float = 1.0
    cluster_size: int = 1
    capacity: float = 5000 * 7.4 * MJ_PER_MWH  # 5000 mAh at 7.4 V

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, (int, float)) and v < 0:
                raise ValueError(f"{f.name} must be non-negative, got {v}")
        if self.cluster_size < 1:
            raise ValueError("cluster_size must be >= 1")

    @property
    def wake_time(self) -> float:
        if self.t_w is not None:
            return self.t_w
        return self.t_ss + self.t_p + self.t_tx

    def processing_power(self, load: Optional[float] = None) -> float:
        return processing_power(self.load if load is None else load, self.proc_a, self.proc_b)

    def wake_energy(self, load: Optional[float] = None) -> float:
        """Energy of one wake (wake-up, sense, process, transmit), excluding sleep."""
        return (self.p_w * self.wake_time + self.p_ss * self.t_ss
                + self.processing_power(load) * self.t_p + self.p_tx * self.t_tx)


PRESETS = {"default": PowerProfile()}


def processing_power(load: float, a: float = 0.5, b: float = 2.7) -> float:
    if load < 0:
        raise ValueError("processing load must be non-negative")
    return a * load + b


def sampling_energy(profile: PowerProfile, load: float, sleep_time: float) -> float:
    """Energy of one complete sampling process followed by ``sleep_time`` of sleep."""
    if sleep_time < 0:
        raise ValueError("sleep_time must be non-negative")
    return profile.wake_energy(load) + profile.p_sl * sleep_time


def mode_energy(mode: Mode, profile: PowerProfile, load: float, sleep_time: float) -> float:
    p = profile
    e_sl = p.p_sl * sleep_time
    e_w = p.p_w * p.wake_time
    e_ss = p.p_ss * p.t_ss
    e_p = p.processing_power(load) * p.t_p
    e_rx = p.p_rx * p.t_rx
    e_tx = p.p_tx * p.t_tx
    if mode is Mode.SLEEP:
        return e_sl
    if mode is Mode.EDGE:
        return e_w + e_ss + e_p + e_tx + e_sl
    if mode in (Mode.RELAY_SAMPLING, Mode.SYNC_SAMPLING):
        return e_w + e_ss + e_rx + e_p + e_tx + e_sl
    if mode is Mode.RELAY_FORWARD:
        return e_rx + e_tx + e_sl
    return e_w + e_rx + e_p + e_tx + e_sl


_MODE_DIVISOR = {"edge": 1, "relay": 2}


def _divisor(mode: str, cluster_size: int) -> int:
    if mode == "sync":
        return cluster_size
    try:
        return _MODE_DIVISOR[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}") from None


def consumption_power(f_s: float, e_sp: float, mode: str = "edge", cluster_size: int = 1) -> float:
    """Approximate average consumption (mW) at sampling rate ``f_s``."""
    return _divisor(mode, cluster_size) * f_s * e_sp


def sustainable_time(e_r: float, f_s: float, e_sp: float, mode: str = "edge",
                     cluster_size: int = 1) -> float:
    if not (f_s > 0 and e_sp > 0):
        raise ValueError("f_s and e_sp must be positive")
    return e_r / (_divisor(mode, cluster_size) * f_s * e_sp)


def energy_threshold_L(max_outage: float, o_m: float, f_s: float, e_sp: float) -> float:
    """Smallest emergency level that still covers the longest harvest outage."""
    return max_outage * o_m * f_s * e_sp


@dataclass
class OperationTally:
    counts: dict = field(default_factory=lambda: dict.fromkeys(OPS, 0))
    durations: dict = field(default_factory=lambda: dict.fromkeys(OPS, 0.0))

    @property
    def total_time(self) -> float:
        return self.durations["sl"] + self.durations["w"]


@dataclass
class EnergyLedger:
    e_initial: float
    capacity: float
    by_op: dict = field(default_factory=lambda: dict.fromkeys(OPS, 0.0))
    e_h: float = 0.0
    spilled: float = 0.0
    depleted: bool = False

    def __post_init__(self):
        if not 0 <= self.e_initial <= self.capacity:
            raise ValueError("e_initial must lie in [0, capacity]")

    @property
    def e_c(self) -> float:
        b = self.by_op
        return b["sl"] + b["w"] + b["p"] + b["ss"] + b["rx"] + b["tx"]

    @property
    def e_r(self) -> float:
        return self.e_initial - self.e_c + self.e_h

    @property
    def alive(self) -> bool:
        return not self.depleted

    def charge(self, op: str, energy: float) -> float:
        """Book consumed energy; once the battery is empty the node is depleted."""
        if energy <= 0:
            return 0.0
        available = self.e_r
        if energy < available:
            self.by_op[op] += energy
            return energy
        self.depleted = True
        before = self.by_op[op]
        self.by_op[op] = before + max(available, 0.0)
        # the sum can overshoot by an ulp; step back until E_r is not negative
        while self.e_r < 0.0 and self.by_op[op] > before:
            self.by_op[op] = math.nextafter(self.by_op[op], before)
        return self.by_op[op] - before

    def harvest(self, energy: float) -> float:
        """Credit harvested energy up to capacity; the excess is spilled."""
        if energy < 0:
            raise ValueError("harvested energy must be non-negative")
        if self.depleted:
            self.spilled += energy
            return 0.0
        credited = min(energy, max(self.capacity - self.e_r, 0.0))
        self.e_h += credited
        self.spilled += energy - credited
        return credited


def accumulate(tally: OperationTally, ledger: EnergyLedger, op: str, duration: float,
               power: float) -> tuple[OperationTally, EnergyLedger]:
    if duration < 0:
        raise ValueError("duration must be non-negative")
    tally.counts[op] += 1
    tally.durations[op] += duration
    ledger.charge(op, power * duration)
    return tally, ledger
