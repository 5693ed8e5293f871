"""Graph and node-state substrate shared by the environments."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidTopologyError


@dataclass(frozen=True)
class Topology:
    node_count: int
    adjacency: np.ndarray
    entry_node: int = 0

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        if adj.shape != (self.node_count, self.node_count):
            raise InvalidTopologyError(f"adjacency shape {adj.shape} does not match {self.node_count} nodes")
        if not np.array_equal(adj, adj.T):
            raise InvalidTopologyError("adjacency must be symmetric")
        if adj.diagonal().any():
            raise InvalidTopologyError("adjacency must have a zero diagonal")
        if not 0 <= self.entry_node < self.node_count:
            raise InvalidTopologyError(f"entry node {self.entry_node} out of range")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        neighbours = tuple(tuple(int(j) for j in np.flatnonzero(adj[i])) for i in range(self.node_count))
        object.__setattr__(self, "_neighbours", neighbours)

    def neighbours(self, node: int) -> tuple[int, ...]:
        return self._neighbours[node]

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2


def make_linear_topology(n: int) -> Topology:
    """Line graph 0 - 1 - ... - (n-1) with the attacker entering at node 0."""
    if n < 2:
        raise InvalidTopologyError(f"a linear topology needs at least 2 nodes, got {n}")
    adj = np.zeros((n, n), dtype=bool)
    idx = np.arange(n - 1)
    adj[idx, idx + 1] = True
    adj[idx + 1, idx] = True
    return Topology(node_count=n, adjacency=adj, entry_node=0)


@dataclass
class NodeStatus:
    vulnerability: float = 1.0
    compromised: bool = False
    decoy_active: bool = False


@dataclass
class NetworkState:
    topology: Topology
    statuses: list[NodeStatus] = field(default_factory=list)

    def __post_init__(self):
        if not self.statuses:
            self.statuses = [NodeStatus() for _ in range(self.topology.node_count)]
        if len(self.statuses) != self.topology.node_count:
            raise InvalidTopologyError("one status per node is required")

    @classmethod
    def clean(cls, topology: Topology) -> "NetworkState":
        return cls(topology)

    def compromised_nodes(self) -> list[int]:
        return [i for i, s in enumerate(self.statuses) if s.compromised]

    def copy(self) -> "NetworkState":
        return NetworkState(
            self.topology,
            [NodeStatus(s.vulnerability, s.compromised, s.decoy_active) for s in self.statuses],
        )


def compromised_count(state: NetworkState) -> int:
    return sum(1 for s in state.statuses if s.compromised)
