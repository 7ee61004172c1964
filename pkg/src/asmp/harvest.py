"""Harvest quality and the stochastic day/night solar model."""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.special import ndtr, ndtri


def harvest_quality(p_h: float, p_max: float) -> float:
    if not p_max > 0:
        raise ValueError("p_max must be positive")
    if p_h < 0 or p_h > p_max:
        raise ValueError(f"harvest power {p_h} outside [0, {p_max}]")
    return p_h / p_max


def harvested_energy(slots: Iterable[tuple[float, float]], p_max: float) -> float:
    """Sum of quality * p_max * period over (quality, period) slots, in mJ."""
    total = 0.0
    for q, period in slots:
        if period <= 0:
            raise ValueError("slot periods must be positive")
        total += q * p_max * period
    return total


@dataclass(frozen=True)
class HarvestConfig:
    p_max: float = 500.0
    mean_day_power: float = 30.0
    quality_std: float = 0.02
    day_length: float = 43200.0
    night_length: float = 43200.0
    phase_offset: float = 0.0  # seconds into the day/night cycle at t=0
    slot_seconds: float = 60.0
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.mean_day_power <= self.p_max:
            raise ValueError("mean_day_power must lie in [0, p_max]")
        if self.quality_std < 0:
            raise ValueError("quality_std must be non-negative")
        if self.day_length < 0 or self.night_length < 0 or self.day_length + self.night_length <= 0:
            raise ValueError("day/night lengths must be non-negative with a positive sum")
        if not self.slot_seconds > 0:
            raise ValueError("slot_seconds must be positive")

    @property
    def mean_quality(self) -> float:
        return self.mean_day_power / self.p_max

    def is_day(self, t: float) -> bool:
        phase = (t + self.phase_offset) % (self.day_length + self.night_length)
        return phase < self.day_length


@lru_cache(maxsize=65536)
def _uniform(seed: int, node_id: int, slot: int) -> float:
    return float(np.random.default_rng([seed, node_id, slot]).random())


def _truncated_normal(mean: float, std: float, u: float) -> float:
    lo = ndtr((0.0 - mean) / std)
    hi = ndtr((1.0 - mean) / std)
    x = mean + std * float(ndtri(lo + u * (hi - lo)))
    return min(max(x, 0.0), 1.0)


def solar_quality_at(t: float, cfg: HarvestConfig, node_id: int = 0) -> float:
    """Harvest quality in [0, 1] at time ``t``.

    Zero at night; by day a normal draw around ``mean_day_power / p_max``
    truncated to [0, 1]. One draw per (seed, node, time slot), so the value
    does not depend on the order in which nodes are stepped.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if not cfg.is_day(t):
        return 0.0
    m = cfg.mean_quality
    if cfg.quality_std == 0:
        return m
    slot = int(math.floor(t / cfg.slot_seconds))
    return _truncated_normal(m, cfg.quality_std, _uniform(cfg.seed, node_id, slot))


class SolarHarvest:
    def __init__(self, cfg: HarvestConfig):
        self.cfg = cfg
        self.p_max = cfg.p_max

    def quality(self, t: float, node_id: int = 0) -> float:
        return solar_quality_at(t, self.cfg, node_id)


class TraceHarvest:
    """Harvest quality replayed from a (seconds, quality) CSV, zero-order hold."""

    def __init__(self, times, qualities, p_max: float = 500.0):
        if len(times) == 0:
            raise ValueError("harvest trace is empty")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("harvest trace times must strictly increase")
        bad = [q for q in qualities if not 0 <= q <= 1]
        if bad:
            raise ValueError(f"harvest trace qualities outside [0, 1]: {bad[:5]}")
        self.times = list(times)
        self.qualities = list(qualities)
        self.p_max = p_max

    @classmethod
    def from_csv(cls, path, p_max: float = 500.0) -> "TraceHarvest":
        times, qs = [], []
        with open(Path(path), newline="") as fh:
            reader = csv.reader(fh)
            next(reader, None)
            for row in reader:
                if not row:
                    continue
                times.append(float(row[0]))
                qs.append(float(row[1]))
        return cls(times, qs, p_max)

    def quality(self, t: float, node_id: int = 0) -> float:
        i = bisect.bisect_right(self.times, t) - 1
        return self.qualities[max(i, 0)]


class ConstantHarvest:
    def __init__(self, power: float, p_max: float = 500.0):
        self.p_max = p_max
        self._q = harvest_quality(power, p_max)

    def quality(self, t: float, node_id: int = 0) -> float:
        return self._q
