"""Deterministic discrete-event loop."""

from __future__ import annotations

import csv
import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

from ..node import Node, NodeClass, NodePacket
from ..server import QosMetrics, ServerPlane, compute_metrics
from .scenario import Scenario
from .topology import rotate_roles

WAKE, DELIVERY, ROTATION = 0, 1, 2
KIND_NAMES = {WAKE: "wake", DELIVERY: "delivery", ROTATION: "rotation"}

TRACE_FIELDS = ("time_s", "node", "event", "role", "node_class", "class_info", "value",
                "condition", "period_s", "e_r_mj", "e_c_mj", "e_h_mj", "quality", "alarm")


@dataclass
class SimResult:
    scenario: Scenario
    algorithm: str
    nodes: dict
    plane: ServerPlane
    trace: list
    packets: list = field(default_factory=list)
    metrics: Optional[QosMetrics] = None

    @property
    def ledgers(self) -> dict:
        return {n: node.ledger for n, node in self.nodes.items()}

    def write_trace(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRACE_FIELDS)
            for row in self.trace:
                w.writerow([_fmt(row[k]) for k in TRACE_FIELDS])

    def write_ledgers(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["node", "e_initial_mj", "e_c_mj", "e_h_mj", "e_r_mj", "spilled_mj",
                        "e_sl", "e_w", "e_p", "e_ss", "e_rx", "e_tx",
                        "n_sl", "n_w", "n_p", "n_ss", "n_rx", "n_tx", "final_class"])
            for n, node in sorted(self.nodes.items()):
                l, t = node.ledger, node.tally
                ops = ("sl", "w", "p", "ss", "rx", "tx")
                w.writerow([n, repr(l.e_initial), repr(l.e_c), repr(l.e_h), repr(l.e_r),
                            repr(l.spilled)] + [repr(l.by_op[o]) for o in ops]
                           + [t.counts[o] for o in ops] + [node.node_class.value])


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return v


class Simulation:
    """One run of a scenario under one algorithm.

    Events are ordered by (time, node id, kind, insertion sequence), so a run
    is a pure function of the scenario and its seed.
    """

    def __init__(self, scenario: Scenario, algorithm: Optional[str] = None, verify: bool = False):
        self.scenario = scenario
        self.algorithm = algorithm or scenario.algorithm
        self.duration = scenario.duration
        n = scenario.n_nodes
        self.configs = {i: scenario.node_config(i, self.algorithm) for i in range(n)}
        self.nodes = {i: Node(i, self.configs[i]) for i in range(n)}
        shared = scenario.signal(0)
        per_node = scenario.raw["signal"].get("per_node")
        self.signals = {i: (scenario.signal(i) if per_node and i else shared) for i in range(n)}
        self.harvest = scenario.harvest()
        self.topology = scenario.topology()
        topo = scenario.raw["topology"]
        self.epoch_len = float(topo["epoch"])
        self.latency = float(topo["latency"])
        sleep = scenario.raw["nodes"].get("sleep_epochs") or {}
        self.sleep_epochs = {int(k): set(v) for k, v in sleep.items()}
        self.plane = ServerPlane(verify=self.configs if verify else None)
        self.trace: list = []
        self.packets: list = []
        self._heap: list = []
        self._seq = itertools.count()
        self._wake_version = dict.fromkeys(self.nodes, 0)
        self.epoch = 0

    def _push(self, t, node, kind, payload=None):
        heapq.heappush(self._heap, (t, node, kind, next(self._seq), payload))

    def _schedule_wake(self, node_id: int, t: float) -> None:
        self._wake_version[node_id] += 1
        if t <= self.duration:
            self._push(t, node_id, WAKE, self._wake_version[node_id])

    def _eligible(self, n: int) -> bool:
        return self.nodes[n].alive and self.epoch not in self.sleep_epochs.get(n, ())

    def _rotate(self, t: float) -> None:
        for n, node in self.nodes.items():
            parked = self.epoch in self.sleep_epochs.get(n, ())
            if parked and node.has_role:
                node.park(t)
                self._wake_version[n] += 1
                self._log(t, n, "park")
            elif not parked and not node.has_role:
                node.resume(t)
                self._schedule_wake(n, t)
                self._log(t, n, "resume")
        rotate_roles(self.topology, self.epoch, self._eligible)

    def _log(self, t, n, event, packet: Optional[NodePacket] = None, period=None):
        node = self.nodes[n]
        l = node.ledger
        self.trace.append({
            "time_s": t, "node": n, "event": event, "role": self.topology.role(n),
            "node_class": node.node_class.value,
            "class_info": packet.class_info if packet else None,
            "value": packet.sample.value if packet else None,
            "condition": packet.condition.name if packet and packet.condition is not None else None,
            "period_s": period, "e_r_mj": l.e_r, "e_c_mj": l.e_c, "e_h_mj": l.e_h,
            "quality": node.quality, "alarm": int(node.alarm),
        })

    def run(self) -> SimResult:
        self._rotate(0.0)
        for n in self.nodes:
            if self.nodes[n].has_role:
                self._schedule_wake(n, 0.0)
        if self.epoch_len < self.duration:
            self._push(self.epoch_len, -1, ROTATION)

        while self._heap:
            t, n, kind, _, payload = heapq.heappop(self._heap)
            if t > self.duration:
                break
            if kind == ROTATION:
                self.epoch += 1
                self._rotate(t)
                if t + self.epoch_len <= self.duration:
                    self._push(t + self.epoch_len, -1, ROTATION)
            elif kind == WAKE:
                if payload == self._wake_version[n]:
                    self._wake(t, n)
            else:
                self._deliver(t, payload)

        for node in self.nodes.values():
            node.settle(self.duration)
        self.plane.finish(self.duration)
        result = SimResult(self.scenario, self.algorithm, self.nodes, self.plane, self.trace,
                           self.packets)
        result.metrics = compute_metrics(self.plane, result.ledgers, self.scenario.grid())
        return result

    def _wake(self, t: float, n: int) -> None:
        node = self.nodes[n]
        value = self.signals[n].value(t, n)
        q = self.harvest.quality(t, n)
        packet, next_wake = node.step(t, value, q, self.harvest.p_max)
        if packet is None:
            self._log(t, n, "dead" if not node.alive else "idle")
            return
        period = packet.next_expected_delay
        t_max = node.cfg.limit.t_max
        assert not period > t_max or packet.alarm, "period above cap"
        self._log(t, n, "wake", packet, period)
        self.packets.append(packet)
        self._push(t + self.latency, n, DELIVERY, packet)
        if next_wake is not None:
            self._schedule_wake(n, next_wake)

    def _deliver(self, t: float, packet: NodePacket) -> None:
        n = packet.node_id
        hops = self.topology.path(n)
        for i, hop in enumerate(hops):
            is_sync = i == len(hops) - 1
            self.nodes[hop].forward(t, as_sync=is_sync)
        self.plane.ingest(packet)


def run(scenario: Scenario, algorithm: Optional[str] = None, verify: bool = False) -> SimResult:
    return Simulation(scenario, algorithm, verify).run()
