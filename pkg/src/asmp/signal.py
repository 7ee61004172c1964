"""Target grid, samples and quantization onto the data plane."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from . import kernels


class SamplingCondition(enum.IntEnum):
    STABLE = kernels.STABLE
    TOO_LONG = kernels.TOO_LONG
    ERROR = kernels.ERROR


@dataclass(frozen=True)
class Sample:
    index: int
    time: float
    value: float


@dataclass(frozen=True)
class TargetGrid:
    """Grid of target values spaced by the meaningful change ``b_prime``.

    ``alpha`` widens or narrows the band around a target that counts as a
    stable hit.
    """

    b_prime: float = 1.0
    alpha: float = 0.2
    event_threshold: Optional[float] = None

    def __post_init__(self):
        if not (self.b_prime > 0 and math.isfinite(self.b_prime)):
            raise ValueError(f"b_prime must be positive and finite, got {self.b_prime}")
        if not (0 < self.alpha <= 0.5):
            raise ValueError(f"alpha must lie in (0, 0.5], got {self.alpha}")


@dataclass(frozen=True)
class Quantization:
    nearest: float
    floor_target: float
    remainder: float


def quantize(value: float, grid: TargetGrid) -> Quantization:
    """Round ``value`` onto the grid (half away from zero) and split off the remainder."""
    if not math.isfinite(value):
        raise ValueError(f"cannot quantize non-finite value {value!r}")
    b_n, b_s, r_n = kernels.quantize_k(float(value), grid.b_prime)
    return Quantization(b_n, b_s, r_n)


def round_to_grid(x: float, grid: TargetGrid) -> float:
    return kernels.round_to_grid(float(x), grid.b_prime)


def classify_distance(q_now: Quantization, q_prev: Quantization, value: float,
                      grid: TargetGrid) -> SamplingCondition:
    # targets are grid aligned, so "more than one step apart" is tested on the
    # rounded step count to stay immune to float noise
    steps = kernels.round_half_away(abs(q_now.nearest - q_prev.nearest) / grid.b_prime)
    if steps >= 2:
        return SamplingCondition.TOO_LONG
    if abs(value - q_now.nearest) < grid.alpha * grid.b_prime:
        return SamplingCondition.STABLE
    return SamplingCondition.ERROR
