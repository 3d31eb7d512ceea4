"""Randomized scenario generation: catalog, call-tree services, and a
topology tuned toward a target average link forwarding load.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import GenerationFailed
from .model import (
    Link,
    MicroserviceType,
    NetworkTopology,
    Node,
    NodeKind,
    REQUEST,
    RESPONSE,
    Scenario,
    compile_service,
)
from .routing import build_routing, lfl

_TOPOLOGY_ATTEMPTS = 50
_CATALOG_ATTEMPTS = 200
#: generated scenarios keep aggregate demand within this share of capacity
_CAPACITY_HEADROOM = 0.8


@dataclass(frozen=True)
class GeneratorParams:
    type_count: int = 50                      # excluding the entry type
    service_count: int = 10
    invocations_range: tuple[int, int] = (5, 8)
    payload_kb_range: tuple[float, float] = (10.0, 100.0)
    cpu_demand_range: tuple[float, float] = (0.1, 0.3)
    mem_demand_range: tuple[float, float] = (100.0, 300.0)
    instances_range: tuple[int, int] = (3, 5)
    arrival_rate_range: tuple[float, float] = (30.0, 50.0)
    access_nodes: int = 5
    routing_nodes: int = 10
    compute_nodes: int = 35
    link_bandwidth: float = 100.0             # Mb/s
    propagation_delay: float = 10e-6          # seconds
    node_cpu: float = 8.0
    node_mem: float = 8000.0
    packet_size_kb: float = 1.0
    target_avg_lfl: float | None = None       # accepted within +/- 10%
    extra_link_fraction: float = 0.3          # used when no LFL target is set
    rng_seed: int = 0

    def __post_init__(self):
        for lo, hi in (
            self.invocations_range, self.payload_kb_range, self.cpu_demand_range,
            self.mem_demand_range, self.instances_range, self.arrival_rate_range,
        ):
            if lo > hi:
                raise ValueError("ranges need min <= max")
        for count in (self.access_nodes, self.routing_nodes, self.compute_nodes):
            if count < 1:
                raise ValueError("need at least one node of each kind")
        if self.type_count < 1 or self.service_count < 1:
            raise ValueError("need at least one type and one service")
        if self.invocations_range[1] > self.type_count:
            raise ValueError("invocations_range exceeds available types")


PRESETS: dict[str, GeneratorParams] = {
    # the full-size profile from the reference scenario family
    "paper": GeneratorParams(),
    # small profile that keeps optimizer runs in the seconds range; load is
    # moderate so the default bandwidth is workable but not slack
    "desk": GeneratorParams(
        type_count=10, service_count=3, invocations_range=(5, 8),
        instances_range=(2, 2), access_nodes=2, routing_nodes=2, compute_nodes=8,
        payload_kb_range=(10.0, 50.0), arrival_rate_range=(10.0, 20.0),
    ),
    # tiny profile whose placement space fits exhaustive enumeration
    "oracle": GeneratorParams(
        type_count=3, service_count=2, invocations_range=(2, 3),
        instances_range=(1, 2), access_nodes=1, routing_nodes=2, compute_nodes=4,
    ),
}


def _sample_catalog(
    params: GeneratorParams, rng: np.random.Generator
) -> tuple[MicroserviceType, ...]:
    cpu_cap = params.compute_nodes * params.node_cpu * _CAPACITY_HEADROOM
    mem_cap = params.compute_nodes * params.node_mem * _CAPACITY_HEADROOM
    for _ in range(_CATALOG_ATTEMPTS):
        types = [MicroserviceType(0, 0.0, 0.0, params.access_nodes)]
        for i in range(1, params.type_count + 1):
            instances = int(rng.integers(
                params.instances_range[0], params.instances_range[1] + 1
            ))
            types.append(MicroserviceType(
                id=i,
                cpu_demand=float(rng.uniform(*params.cpu_demand_range)),
                mem_demand=float(rng.uniform(*params.mem_demand_range)),
                instance_count=min(instances, params.compute_nodes),
            ))
        cpu_total = sum(t.cpu_demand * t.instance_count for t in types)
        mem_total = sum(t.mem_demand * t.instance_count for t in types)
        if cpu_total <= cpu_cap and mem_total <= mem_cap:
            return tuple(types)
    raise GenerationFailed(
        "could not sample a catalog within the capacity headroom; "
        "grow the nodes or shrink the demand ranges"
    )


def _sample_call_events(
    params: GeneratorParams, rng: np.random.Generator
) -> list[tuple[int, int, str]]:
    """Depth-first call tree over distinct types, chain-biased, with an
    occasional repeated sub-call, linearized to a balanced event list."""
    length = int(rng.integers(
        params.invocations_range[0], params.invocations_range[1] + 1
    ))
    chosen = [int(t) for t in rng.choice(
        np.arange(1, params.type_count + 1), size=length, replace=False
    )]
    calls: dict[int, list[int]] = {t: [] for t in chosen}
    for prev, cur in zip(chosen, chosen[1:]):
        # mostly a chain; sometimes branch off an earlier type
        if rng.random() < 0.7:
            parent = prev
        else:
            parent = chosen[int(rng.integers(0, chosen.index(cur)))]
        calls[parent].append(cur)
    if length > 1 and rng.random() < 0.5:
        # repeat one existing leaf call, mirroring double-invocation chains
        parents = [t for t in chosen if calls[t]]
        parent = parents[int(rng.integers(0, len(parents)))]
        child = calls[parent][int(rng.integers(0, len(calls[parent])))]
        if not calls[child]:
            calls[parent].append(child)

    events: list[tuple[int, int, str]] = []

    def walk(t: int) -> None:
        for child in calls[t]:
            events.append((t, child, REQUEST))
            walk(child)
            events.append((child, t, RESPONSE))

    root = chosen[0]
    events.append((0, root, REQUEST))
    walk(root)
    events.append((root, 0, RESPONSE))
    return events


def _sample_topology(
    params: GeneratorParams, rng: np.random.Generator, nodes: list[Node]
) -> NetworkTopology:
    n = len(nodes)
    for _ in range(_TOPOLOGY_ATTEMPTS):
        order = [int(x) for x in rng.permutation(n)]
        pairs: set[tuple[int, int]] = set()
        for idx in range(1, n):
            other = order[int(rng.integers(0, idx))]
            a, b = sorted((order[idx], other))
            pairs.add((a, b))

        def topo() -> NetworkTopology:
            return NetworkTopology(nodes, [
                Link(a, b, params.link_bandwidth, params.propagation_delay)
                for a, b in sorted(pairs)
            ])

        if params.target_avg_lfl is None:
            extra = round(params.extra_link_fraction * n)
            candidates = [
                (a, b) for a in range(n) for b in range(a + 1, n)
                if (a, b) not in pairs
            ]
            if extra and candidates:
                picks = rng.choice(len(candidates), size=min(extra, len(candidates)),
                                   replace=False)
                for c in picks:
                    pairs.add(candidates[int(c)])
            return topo()

        lo = params.target_avg_lfl * 0.9
        hi = params.target_avg_lfl * 1.1
        t = topo()
        avg = lfl(t, build_routing(t)).average
        while avg > hi:
            candidates = [
                (a, b) for a in range(n) for b in range(a + 1, n)
                if (a, b) not in pairs
            ]
            if not candidates:
                break
            pairs.add(candidates[int(rng.integers(0, len(candidates)))])
            t = topo()
            avg = lfl(t, build_routing(t)).average
        if lo <= avg <= hi:
            return t
    raise GenerationFailed(
        f"could not hit average link forwarding load {params.target_avg_lfl} +/- 10%"
    )


def generate_scenario(params: GeneratorParams) -> Scenario:
    rng = np.random.default_rng(params.rng_seed)
    catalog = _sample_catalog(params, rng)

    services = []
    payload_lo, payload_hi = params.payload_kb_range
    per_service_rates: list[np.ndarray] = []
    for k in range(params.service_count):
        events = _sample_call_events(params, rng)
        edges = sorted({(frm, to) for frm, to, kind in events if kind == REQUEST})
        payload_table = {
            edge: (float(rng.uniform(payload_lo, payload_hi)),
                   float(rng.uniform(payload_lo, payload_hi)))
            for edge in edges
        }
        services.append(compile_service(
            service_id=k,
            weight=1.0 / params.service_count,
            sequence=events,
            payload_table=payload_table,
            type_count=len(catalog),
        ))
        total = rng.uniform(*params.arrival_rate_range)
        shares = rng.uniform(0.1, 1.0, size=params.access_nodes)
        per_service_rates.append(total * shares / shares.sum())

    nodes: list[Node] = []
    nid = 0
    for _ in range(params.access_nodes):
        rates = tuple(float(per_service_rates[k][nid]) for k in range(params.service_count))
        nodes.append(Node(nid, NodeKind.USER_ACCESS, arrival_rates=rates))
        nid += 1
    for _ in range(params.routing_nodes):
        nodes.append(Node(nid, NodeKind.ROUTING))
        nid += 1
    for _ in range(params.compute_nodes):
        nodes.append(Node(nid, NodeKind.COMPUTE,
                          cpu_capacity=params.node_cpu, mem_capacity=params.node_mem))
        nid += 1

    topology = _sample_topology(params, rng, nodes)
    return Scenario(
        topology=topology,
        catalog=catalog,
        services=tuple(services),
        packet_size=params.packet_size_kb,
        rng_seed=params.rng_seed,
    )


def scale_bandwidth(scenario: Scenario, factor: float) -> Scenario:
    links = [
        Link(ln.a, ln.b, ln.bandwidth * factor, ln.propagation_delay)
        for ln in scenario.topology.links
    ]
    topo = NetworkTopology(scenario.topology.nodes, links)
    return replace(scenario, topology=topo)


def scale_arrival_rates(scenario: Scenario, factor: float) -> Scenario:
    nodes = [
        replace(n, arrival_rates=tuple(r * factor for r in n.arrival_rates))
        if n.kind is NodeKind.USER_ACCESS else n
        for n in scenario.topology.nodes
    ]
    topo = NetworkTopology(nodes, list(scenario.topology.links))
    return replace(scenario, topology=topo)
