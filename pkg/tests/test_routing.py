from collections import deque

import numpy as np
import pytest

from edgeplan.errors import DisconnectedTopology
from edgeplan.model import Link, NetworkTopology, Node, NodeKind
from edgeplan.routing import build_routing, lfl

from helpers import ring_topology


def _routers(n):
    return [Node(0, NodeKind.USER_ACCESS, arrival_rates=(1.0,))] + [
        Node(i, NodeKind.ROUTING) for i in range(1, n)
    ]


def test_single_edge_paths():
    topo = NetworkTopology(_routers(2), [Link(0, 1, 100, 0)])
    table = build_routing(topo)
    assert table.path(0, 1) == ((0, 1),)
    assert table.path(1, 0) == ((1, 0),)
    assert table.path(0, 0) == ()


def test_four_ring_tie_break():
    # 0-1-2-3-0: both 0-1-2 and 0-3-2 reach 2 in two hops;
    # the smaller node sequence wins.
    topo = ring_topology(4)
    table = build_routing(topo)
    assert table.path(0, 2) == ((0, 1), (1, 2))
    assert table.path(2, 0) == ((2, 1), (1, 0))


def test_line_lfl_hand_count():
    # a-b-c line: ordered pairs through each directed hop counted by hand.
    topo = NetworkTopology(_routers(3), [Link(0, 1, 100, 0), Link(1, 2, 100, 0)])
    table = build_routing(topo)
    report = lfl(topo, table)
    # hop (0,1) carries 0->1 and 0->2; (1,2) carries 0->2 and 1->2
    assert report.directed_load[(0, 1)] == 2
    assert report.directed_load[(1, 0)] == 2
    assert report.directed_load[(1, 2)] == 2
    assert report.directed_load[(2, 1)] == 2
    assert report.link_load(0, 1) == 4
    assert report.average == pytest.approx(4.0)


def test_seven_ring_uniform_load():
    topo = ring_topology(7)
    report = lfl(topo, build_routing(topo))
    for (x, y) in topo.directed_links():
        assert report.directed_load[(x, y)] == 6
    assert report.average == pytest.approx(12.0)


def test_path_hop_conservation():
    topo = ring_topology(6)
    table = build_routing(topo)
    for p in range(6):
        for q in range(6):
            hops = table.path(p, q)
            if p == q:
                assert hops == ()
                continue
            assert hops[0][0] == p and hops[-1][1] == q
            for (a, b), (c, _) in zip(hops, hops[1:]):
                assert b == c


def _bfs_dist(adj, src, dst):
    seen = {src: 0}
    q = deque([src])
    while q:
        u = q.popleft()
        if u == dst:
            return seen[u]
        for v in adj[u]:
            if v not in seen:
                seen[v] = seen[u] + 1
                q.append(v)
    return None


@pytest.mark.parametrize("seed", range(12))
def test_random_topologies_shortest_and_minimal(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 10))
    # random connected graph: path backbone plus random chords
    links = [Link(i, i + 1, 100, 0) for i in range(n - 1)]
    present = {(i, i + 1) for i in range(n - 1)}
    for _ in range(n):
        a, b = sorted(rng.choice(n, size=2, replace=False).tolist())
        if (a, b) not in present:
            present.add((a, b))
            links.append(Link(a, b, 100, 0))
    topo = NetworkTopology(_routers(n), links)
    adj = {i: [] for i in range(n)}
    for l in links:
        adj[l.a].append(l.b)
        adj[l.b].append(l.a)
    table = build_routing(topo)
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            hops = table.path(p, q)
            assert len(hops) == _bfs_dist(adj, p, q)
            # every hop must be a real edge
            for x, y in hops:
                assert y in adj[x]
            # lexicographically smallest node sequence among equal-length paths:
            # cheap necessary check, first hop goes to the smallest viable neighbor
            best = min(
                y for x, y in [(p, v) for v in adj[p]]
                if _bfs_dist(adj, y, q) == len(hops) - 1
            )
            assert hops[0][1] == best


def test_routing_deterministic():
    topo = ring_topology(8)
    t1 = build_routing(topo)
    t2 = build_routing(topo)
    assert t1.paths == t2.paths


def test_disconnected_raises():
    nodes = _routers(4)
    with pytest.raises(DisconnectedTopology):
        build_routing(NetworkTopology(nodes, [Link(0, 1, 100, 0), Link(2, 3, 100, 0)]))
