"""Straight-line reference evaluator for cross-checking the delay pipeline.

Deliberately written with plain Python loops and dicts, no shared code with
the package's vectorized implementation beyond the data model itself.  Slow,
but easy to audit by eye.
"""

from __future__ import annotations

from edgeplan.model import Deployment, Scenario
from edgeplan.routing import RoutingTable

KB_TO_MB = 8.0 / 1000.0
PENALTY = 1.0e6


def reference_total(
    scenario: Scenario, deployment: Deployment, routing: RoutingTable
) -> float:
    topo = scenario.topology

    # enumerate instances: (type, node) in ascending node order per type
    instances: list[tuple[int, int]] = []
    for i in range(scenario.type_count):
        for node in sorted(deployment.instance_nodes(i)):
            instances.append((i, node))

    # per-service selection probability of each instance
    probs_per_service: list[list[float]] = []
    for k in range(len(scenario.services)):
        lam_total = sum(
            topo.nodes[p].arrival_rates[k] for p in topo.access_nodes
        )
        probs = []
        for (i, node) in instances:
            if i == 0:
                probs.append(topo.nodes[node].arrival_rates[k] / lam_total)
            else:
                count = len(deployment.instance_nodes(i))
                probs.append(1.0 / count)
        probs_per_service.append(probs)

    # per-instance-pair request/response frequencies and kilobyte volumes
    n_inst = len(instances)
    freq: list[list[list[float]]] = []
    kb: list[list[list[float]]] = []
    for k, svc in enumerate(scenario.services):
        p = probs_per_service[k]
        f = [[0.0] * n_inst for _ in range(n_inst)]
        d = [[0.0] * n_inst for _ in range(n_inst)]
        for a in range(n_inst):
            for b in range(n_inst):
                i, _ = instances[a]
                j, _ = instances[b]
                calls = float(svc.request_matrix[i, j])
                if calls:
                    fr = p[a] * p[b] * calls
                    f[a][b] += fr
                    f[b][a] += fr  # every request draws one response
                    d[a][b] += fr * float(svc.payload_req[i, j])
                    d[b][a] += fr * float(svc.payload_res[j, i])
        freq.append(f)
        kb.append(d)

    # direct node-to-node traffic in Mb/s, then per-link totals
    n = len(topo)
    direct = [[0.0] * n for _ in range(n)]
    for k in range(len(scenario.services)):
        lam = scenario.aggregate_arrival(k)
        for a in range(n_inst):
            for b in range(n_inst):
                pnode = instances[a][1]
                qnode = instances[b][1]
                direct[pnode][qnode] += lam * kb[k][a][b] * KB_TO_MB

    link_total = {}
    for x, y in topo.directed_links():
        link_total[(x, y)] = 0.0
    for p in range(n):
        for q in range(n):
            if p == q or direct[p][q] == 0.0:
                continue
            for hop in routing.path(p, q):
                link_total[hop] += direct[p][q]

    saturated = False
    overload = 0.0
    for hop, load in link_total.items():
        cap = topo.bandwidth(*hop)
        if load >= cap:
            saturated = True
        if load > cap:
            overload += load / cap - 1.0
    if saturated:
        return PENALTY + overload

    residual = {hop: topo.bandwidth(*hop) - load for hop, load in link_total.items()}

    def bottleneck(p: int, q: int) -> float:
        return min(residual[h] for h in routing.path(p, q))

    def path_prop(p: int, q: int) -> float:
        return sum(topo.propagation(*h) for h in routing.path(p, q))

    total = 0.0
    for k, svc in enumerate(scenario.services):
        tk = 0.0
        for a in range(n_inst):
            for b in range(n_inst):
                p = instances[a][1]
                q = instances[b][1]
                if p == q:
                    continue
                if freq[k][a][b] == 0.0 and kb[k][a][b] == 0.0:
                    continue
                tk += freq[k][a][b] * path_prop(p, q)
                tk += kb[k][a][b] * KB_TO_MB / bottleneck(p, q)
        total += svc.weight * tk
    return total
