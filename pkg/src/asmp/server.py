"""Server-side data plane: packet ingestion, dual-prediction filling and metrics."""

from __future__ import annotations

import csv
import enum
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

import numpy as np

from . import kernels
from .casa import casa_step
from .energy import EnergyLedger, mj_to_mwh
from .mvp import AsaState, asa_step
from .node import NodeConfig, NodePacket
from .signal import SamplingCondition, TargetGrid


class PointKind(enum.Enum):
    SAMPLED = "sampled"
    PREDICTED = "predicted"


class Origin(enum.Enum):
    NONE = "none"
    ASA_CORRECTION = "asa-correction"
    CASA = "casa"
    RASA = "rasa"


@dataclass(frozen=True)
class PlanePoint:
    node: int
    time: float
    value: float
    kind: PointKind = PointKind.SAMPLED
    origin: Origin = Origin.NONE

    def __post_init__(self):
        if (self.kind is PointKind.PREDICTED) == (self.origin is Origin.NONE):
            raise ValueError("predicted points need an origin and sampled points must not have one")


class OutOfOrderPacket(RuntimeError):
    pass


class MirrorMismatch(AssertionError):
    """Server-side recomputation disagrees with what the node reported."""


@dataclass
class QosMetrics:
    sample_count: int = 0
    predicted_count: int = 0
    mse_sampled: float = 0.0
    energy_mwh: dict = field(default_factory=dict)
    plane_max_gap: float = 0.0
    empty: bool = False

    @property
    def total_energy_mwh(self) -> float:
        return sum(self.energy_mwh.values())


class ServerPlane:
    """Collects packets and fills the gaps between samples with forecasts.

    Forecasts are held as pending until either their time passes (a later
    packet from the same node, or :meth:`finish`) or a real sample at or
    before their timestamp supersedes them.

    With ``verify`` set to a mapping of node id to :class:`NodeConfig` the
    server re-runs the node's filter on every packet and raises
    :class:`MirrorMismatch` if the carried values differ in any bit.
    """

    def __init__(self, verify: Optional[Mapping[int, NodeConfig]] = None):
        self.points: list[PlanePoint] = []
        self.pending: dict[int, list[PlanePoint]] = defaultdict(list)
        self.cancelled: dict[Origin, int] = defaultdict(int)
        self.scheduled: dict[Origin, int] = defaultdict(int)
        self._last_time: dict[int, float] = {}
        self._verify = verify
        self._mirrors: dict[int, AsaState] = {}

    def ingest(self, packet: NodePacket) -> list[PlanePoint]:
        node = packet.node_id
        t = packet.sample.time
        last = self._last_time.get(node)
        if last is not None and t <= last:
            raise OutOfOrderPacket(f"node {node}: packet at t={t} after t={last}")
        self._last_time[node] = t
        if self._verify is not None:
            self._mirror(packet)

        self._materialize(node, t)
        self.cancel_stale_predictions(node, t)
        self.points.append(PlanePoint(node, t, packet.sample.value))
        new = self._schedule(packet)
        self.pending[node].extend(new)
        return new

    def _materialize(self, node: int, t: float) -> None:
        keep = []
        for p in self.pending[node]:
            if p.time < t:
                self.points.append(p)
            else:
                keep.append(p)
        self.pending[node] = keep

    def cancel_stale_predictions(self, node: int, t: float) -> int:
        stale = [p for p in self.pending[node] if p.time >= t]
        for p in stale:
            self.cancelled[p.origin] += 1
        self.pending[node] = [p for p in self.pending[node] if p.time < t]
        return len(stale)

    def _schedule(self, packet: NodePacket) -> list[PlanePoint]:
        node, t, d = packet.node_id, packet.sample.time, packet.sample.value
        sign = 1.0 if packet.trend >= 0 else -1.0
        out = []
        if packet.condition is SamplingCondition.ERROR and packet.correction_delay is not None:
            t_post = packet.correction_delay
            if math.isfinite(t_post) and t_post > 0:
                v_post = (packet.v_now + packet.v_next) / 2
                out.append(PlanePoint(node, t + t_post, d + sign * abs(v_post) * t_post,
                                      PointKind.PREDICTED, Origin.ASA_CORRECTION))
        if packet.class_info == "1":
            t1 = packet.predict_delay
            out.append(PlanePoint(node, t + t1, d + sign * abs(packet.v_next) * t1,
                                  PointKind.PREDICTED, Origin.CASA))
        elif packet.class_info != "A":
            n = int(packet.class_info)
            base = packet.base_period
            for k in range(1, n):
                out.append(PlanePoint(node, t + k * base, d + sign * abs(packet.v_next) * k * base,
                                      PointKind.PREDICTED, Origin.RASA))
        for p in out:
            self.scheduled[p.origin] += 1
        return out

    def _mirror(self, packet: NodePacket) -> None:
        cfg = self._verify[packet.node_id]
        state = self._mirrors.get(packet.node_id)
        if state is None or packet.asa_reset:
            state = AsaState.fresh(cfg.initial_rate)
        if cfg.algorithm == "fixed":
            return
        limit = cfg.limit
        if packet.alarm:
            limit = limit.pinned(cfg.alarm_period or cfg.fixed_period)
        state, dec = asa_step(state, packet.sample, cfg.grid, limit)
        checks = {
            "condition": (dec.condition, packet.condition),
            "v_now": (dec.v_now, packet.v_now),
            "v_next": (dec.v_next, packet.v_next),
            "correction_delay": (dec.server_correction_delay, packet.correction_delay),
        }
        for name, (mine, theirs) in checks.items():
            if mine != theirs and not (isinstance(mine, float) and math.isnan(mine)
                                       and isinstance(theirs, float) and math.isnan(theirs)):
                raise MirrorMismatch(f"node {packet.node_id} sample {packet.sample.index}: "
                                     f"{name} server={mine!r} node={theirs!r}")
        if packet.class_info == "1":
            state, casa = casa_step(state, dec, cfg.casa, cfg.grid, limit)
            if not casa.skip or casa.casa_period != packet.next_expected_delay:
                raise MirrorMismatch(f"node {packet.node_id}: CASA skip not reproduced")
        elif packet.class_info != "A":
            n = int(packet.class_info)
            step = abs(dec.v_next) * (n - 1) * packet.base_period
            corrected = kernels.round_to_grid(packet.sample.value + (step if packet.trend >= 0 else -step),
                                              cfg.grid.b_prime)
            state = replace(state, b_prev=corrected, rate_now=1.0 / packet.next_expected_delay)
        elif dec.next_period != packet.next_expected_delay:
            raise MirrorMismatch(f"node {packet.node_id}: period server={dec.next_period!r} "
                                 f"node={packet.next_expected_delay!r}")
        self._mirrors[packet.node_id] = state

    def finish(self, duration: float) -> None:
        """Materialize forecasts up to ``duration``; later ones are cancelled."""
        for node in list(self.pending):
            self._materialize(node, duration)
            self.cancel_stale_predictions(node, duration)

    def node_points(self, node: int) -> list[PlanePoint]:
        return sorted((p for p in self.points if p.node == node), key=lambda p: p.time)

    def write_csv(self, path) -> None:
        rows = sorted(self.points, key=lambda p: (p.node, p.time, p.kind.value))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["node", "time_s", "value", "kind", "origin"])
            for p in rows:
                w.writerow([p.node, repr(p.time), repr(p.value), p.kind.value, p.origin.value])


def plane_max_gap(points: Iterable[PlanePoint]) -> float:
    by_node = defaultdict(list)
    for p in points:
        by_node[p.node].append(p.time)
    gap = 0.0
    for times in by_node.values():
        if len(times) > 1:
            gap = max(gap, float(np.max(np.diff(np.sort(times)))))
    return gap


def compute_metrics(plane: ServerPlane, ledgers: Mapping[int, EnergyLedger],
                    grid: TargetGrid) -> QosMetrics:
    energy = {n: mj_to_mwh(l.e_c) for n, l in sorted(ledgers.items())}
    sampled = np.array([p.value for p in plane.points if p.kind is PointKind.SAMPLED], dtype=float)
    if not plane.points:
        return QosMetrics(energy_mwh=energy, empty=True)
    n_pred = sum(1 for p in plane.points if p.kind is PointKind.PREDICTED)
    mse = kernels.squared_grid_error(sampled, grid.b_prime) / len(sampled) if len(sampled) else 0.0
    return QosMetrics(sample_count=len(sampled), predicted_count=n_pred, mse_sampled=float(mse),
                      energy_mwh=energy, plane_max_gap=plane_max_gap(plane.points))
