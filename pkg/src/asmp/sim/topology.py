"""Clusters, role rotation and forwarding paths."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional


@dataclass
class Cluster:
    members: list
    relays: int = 0
    sync: Optional[int] = None
    relay_nodes: list = field(default_factory=list)
    active: bool = True


@dataclass
class Topology:
    clusters: list

    @classmethod
    def single_cluster(cls, n_nodes: int, relays: int = 0) -> "Topology":
        return cls([Cluster(list(range(n_nodes)), relays)])

    @classmethod
    def chunked(cls, n_nodes: int, cluster_size: int, relays: int = 0) -> "Topology":
        if cluster_size < 1:
            raise ValueError("cluster_size must be >= 1")
        ids = list(range(n_nodes))
        return cls([Cluster(ids[i:i + cluster_size], relays)
                    for i in range(0, n_nodes, cluster_size)])

    def cluster_of(self, node: int) -> Cluster:
        for c in self.clusters:
            if node in c.members:
                return c
        raise KeyError(node)

    def role(self, node: int) -> str:
        c = self.cluster_of(node)
        if node == c.sync:
            return "sync"
        if node in c.relay_nodes:
            return "relay"
        return "edge"

    def path(self, node: int) -> list:
        """Forwarders between ``node`` and the server, nearest first."""
        c = self.cluster_of(node)
        if c.sync is None or node == c.sync:
            return []
        hops = []
        if c.relay_nodes and node not in c.relay_nodes:
            others = [m for m in c.members if m != c.sync and m not in c.relay_nodes]
            hops.append(c.relay_nodes[others.index(node) % len(c.relay_nodes)])
        hops.append(c.sync)
        return hops


def rotate_roles(topology: Topology, epoch: int,
                 eligible: Callable[[int], bool] = lambda n: True) -> Topology:
    """Round-robin the sync role, skipping ineligible (dead or parked) nodes.

    Relays, if any, are the next eligible members after the sync in the
    rotation order. A cluster with no eligible member is marked inactive.
    """
    for c in topology.clusters:
        size = len(c.members)
        order = [c.members[(epoch + k) % size] for k in range(size)]
        live = [n for n in order if eligible(n)]
        if not live:
            c.active = False
            c.sync = None
            c.relay_nodes = []
            continue
        c.active = True
        c.sync = live[0]
        c.relay_nodes = live[1:1 + c.relays] if len(live) > c.relays + 1 else []
    return topology
