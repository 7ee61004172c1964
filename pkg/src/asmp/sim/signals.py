"""Signal sources: piecewise-linear generators and CSV traces."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np


class TraceLoadError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class PiecewiseLinearSignal:
    """Signal read by linear interpolation between breakpoints.

    ``noise_std`` adds an independent Gaussian term to every reading; the
    draws are keyed by (seed, node, reading time) so two nodes, or two runs,
    never share a stream by accident.
    """

    def __init__(self, times, values, noise_std: float = 0.0, seed: int = 0):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.times.ndim != 1 or self.times.shape != self.values.shape:
            raise ValueError("times and values must be 1-D and of equal length")
        if len(self.times) < 2:
            raise ValueError("need at least two breakpoints")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("breakpoint times must strictly increase")
        if noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        self.noise_std = noise_std
        self.seed = seed

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def clean(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))

    def value(self, t: float, node_id: int = 0) -> float:
        v = self.clean(t)
        if self.noise_std > 0:
            key = int(round(t * 1e6))
            v += self.noise_std * float(np.random.default_rng([self.seed, node_id, key]).standard_normal())
        return v


@dataclass(frozen=True)
class DynamicParams:
    low: float = 16.0
    high: float = 43.0
    duration: float = 4950.0
    slope_min: float = 0.05
    slope_max: float = 0.15
    seg_min: float = 200.0
    seg_max: float = 800.0
    flip_prob: float = 0.3
    start: Optional[float] = None
    noise_std: float = 0.0

    def __post_init__(self):
        if not self.low < self.high:
            raise ValueError("bounds need low < high")
        if not 0 <= self.slope_min <= self.slope_max:
            raise ValueError("need 0 <= slope_min <= slope_max")
        if not 0 < self.seg_min <= self.seg_max:
            raise ValueError("need 0 < seg_min <= seg_max")
        if not 0 <= self.flip_prob <= 1:
            raise ValueError("flip_prob must lie in [0, 1]")
        if not self.duration > 0:
            raise ValueError("duration must be positive")


def generate_dynamic_transition(params: DynamicParams, seed: int) -> PiecewiseLinearSignal:
    """Random piecewise-linear walk confined to [low, high].

    Each segment draws a duration and a slope magnitude uniformly and a
    random direction; a segment that would leave the band is cut where it
    meets the bound and the next one heads back inside.
    """
    rng = np.random.default_rng([seed, 0x5157])
    lo, hi = params.low, params.high
    v = params.start if params.start is not None else float(rng.uniform(lo, hi))
    v = min(max(v, lo), hi)
    t = 0.0
    times, values = [t], [v]
    direction = 1.0 if rng.random() < 0.5 else -1.0
    while t < params.duration:
        dur = float(rng.uniform(params.seg_min, params.seg_max))
        slope = float(rng.uniform(params.slope_min, params.slope_max))
        if rng.random() < params.flip_prob:
            direction = -direction
        if v >= hi:
            direction = -1.0
        elif v <= lo:
            direction = 1.0
        dur = min(dur, params.duration - t)
        end = v + direction * slope * dur
        if end > hi or end < lo:
            bound = hi if end > hi else lo
            if slope > 0:
                dur = abs(bound - v) / slope
            end = bound
        if dur <= 0:
            direction = -direction
            continue
        t += dur
        v = end
        times.append(t)
        values.append(v)
    return PiecewiseLinearSignal(times, values, params.noise_std, seed)


def ramp(slope: float, start_value: float, duration: float, noise_std: float = 0.0,
         seed: int = 0) -> PiecewiseLinearSignal:
    return PiecewiseLinearSignal([0.0, duration], [start_value, start_value + slope * duration],
                                 noise_std, seed)


def load_csv_trace(path, noise_std: float = 0.0, seed: int = 0) -> PiecewiseLinearSignal:
    """Read a two-column (time, value) CSV with a header row.

    Times are shifted so the trace starts at t=0. All problems are collected
    and raised together as :class:`TraceLoadError`.
    """
    path = Path(path)
    problems = []
    times, values = [], []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise TraceLoadError([f"{path}: {exc.strerror or exc}"]) from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TraceLoadError([f"{path}: empty file"])
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                problems.append(f"line {lineno}: expected 2 columns, got {len(row)}")
                continue
            try:
                t, v = float(row[0]), float(row[1])
            except ValueError:
                problems.append(f"line {lineno}: unparsable row {row!r}")
                continue
            if not (math.isfinite(t) and math.isfinite(v)):
                problems.append(f"line {lineno}: non-finite value")
                continue
            if times and t <= times[-1]:
                problems.append(f"line {lineno}: time {t} does not increase (previous {times[-1]})")
                continue
            times.append(t)
            values.append(v)
    if len(times) < 2 and not problems:
        problems.append(f"{path}: need at least 2 data rows, found {len(times)}")
    if problems:
        raise TraceLoadError(problems)
    t0 = times[0]
    return PiecewiseLinearSignal([t - t0 for t in times], values, noise_std, seed)


def synthetic_diurnal_day(seed: int = 2017, low: float = 4.4, high: float = 20.4,
                          step: float = 60.0, rows: int = 1440):
    """A smooth one-day temperature curve with weather wiggle, per minute.

    Minimum near dawn, maximum mid-afternoon; rescaled so the extremes hit
    ``low`` and ``high`` exactly. Returns (times, values).
    """
    rng = np.random.default_rng(seed)
    t = np.arange(rows) * step
    hours = t / 3600.0
    base = -np.cos(2 * np.pi * (hours - 3.0) / 24.0)
    wiggle = np.zeros(rows)
    for k in range(2, 6):
        wiggle += rng.normal(0, 0.08 / k) * np.sin(2 * np.pi * k * hours / 24.0 + rng.uniform(0, 2 * np.pi))
    walk = np.cumsum(rng.normal(0, 0.004, rows))
    walk -= np.linspace(walk[0], walk[-1], rows)
    y = base + wiggle + walk
    y = (y - y.min()) / (y.max() - y.min())
    values = np.round(low + (high - low) * y, 2)
    return t, values
