"""Static shortest-path routing and link forwarding load.

Paths minimize hop count; among equal-length paths the lexicographically
smallest node-id sequence wins, so two builds over the same topology are
bit-identical.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import DisconnectedTopology
from .model import NetworkTopology

Hop = tuple[int, int]


class RoutingTable:
    def __init__(self, paths: dict[tuple[int, int], tuple[Hop, ...]]):
        self.paths = paths
        # reverse index: directed link -> ordered pairs routed through it
        hop_pairs: dict[Hop, list[tuple[int, int]]] = {}
        for pair, path in paths.items():
            for hop in path:
                hop_pairs.setdefault(hop, []).append(pair)
        self.hop_pairs = {h: tuple(ps) for h, ps in hop_pairs.items()}

    def path(self, p: int, q: int) -> tuple[Hop, ...]:
        return self.paths[(p, q)]

    def contains_hop(self, p: int, q: int, x: int, y: int) -> bool:
        return (x, y) in self.paths[(p, q)]


@dataclass(frozen=True)
class LflReport:
    """Forwarding load per directed link plus the network-wide average.

    ``link_load`` for an undirected link sums both directions, matching the
    per-link figures quoted for uniform example topologies; ``average``
    divides the all-pairs double sum by the undirected edge count.
    """
    directed_load: dict[Hop, int]
    average: float

    def link_load(self, x: int, y: int) -> int:
        return self.directed_load.get((x, y), 0) + self.directed_load.get((y, x), 0)


def _bfs_distances(topology: NetworkTopology, src: int) -> list[int]:
    dist = [-1] * len(topology)
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in topology.adjacency[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def build_routing(topology: NetworkTopology) -> RoutingTable:
    n = len(topology)
    dist_to = [_bfs_distances(topology, q) for q in range(n)]
    for q in range(n):
        for p in range(n):
            if dist_to[q][p] < 0:
                raise DisconnectedTopology(f"no path between nodes {p} and {q}")

    paths: dict[tuple[int, int], tuple[Hop, ...]] = {}
    for p in range(n):
        for q in range(n):
            if p == q:
                paths[(p, q)] = ()
                continue
            # walk greedily toward q, always picking the smallest-id neighbor
            # that stays on a shortest path: yields the lexicographically
            # smallest node sequence
            hops: list[Hop] = []
            cur = p
            while cur != q:
                nxt = min(
                    v for v in topology.adjacency[cur]
                    if dist_to[q][v] == dist_to[q][cur] - 1
                )
                hops.append((cur, nxt))
                cur = nxt
            paths[(p, q)] = tuple(hops)
    return RoutingTable(paths)


def lfl(topology: NetworkTopology, table: RoutingTable) -> LflReport:
    load: dict[Hop, int] = {h: 0 for h in topology.directed_links()}
    for hop, pairs in table.hop_pairs.items():
        load[hop] = len(pairs)
    total = sum(load.values())
    # the double sum over (x, y) counts both directions of every link; the
    # denominator is the undirected edge count, which reproduces the uniform
    # ring example (per-link load 12, average 12)
    average = total / len(topology.links) if topology.links else 0.0
    return LflReport(directed_load=load, average=average)
