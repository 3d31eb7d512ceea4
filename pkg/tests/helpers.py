"""Hand-built scenarios and small utilities shared by the tests."""

from __future__ import annotations

import numpy as np

from edgeplan.model import (
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


def chain_scenario(
    *,
    arrival: float = 10.0,
    bw_access: float = 100.0,
    bw_inter: float = 100.0,
    prop: float = 10e-6,
    payload_head: tuple[float, float] = (50.0, 50.0),
    payload_mid: tuple[float, float] = (50.0, 50.0),
    node_cpu: float = 2.0,
    node_mem: float = 2000.0,
) -> Scenario:
    """access(0) -- compute(1) -- compute(2); one service 0->1->2."""
    nodes = [
        Node(0, NodeKind.USER_ACCESS, arrival_rates=(arrival,)),
        Node(1, NodeKind.COMPUTE, cpu_capacity=node_cpu, mem_capacity=node_mem),
        Node(2, NodeKind.COMPUTE, cpu_capacity=node_cpu, mem_capacity=node_mem),
    ]
    links = [Link(0, 1, bw_access, prop), Link(1, 2, bw_inter, prop)]
    catalog = (
        MicroserviceType(0, 0, 0, 1),
        MicroserviceType(1, 1.0, 100.0, 1),
        MicroserviceType(2, 1.0, 100.0, 1),
    )
    svc = compile_service(
        service_id=0,
        weight=1.0,
        sequence=[
            (0, 1, REQUEST), (1, 2, REQUEST), (2, 1, RESPONSE), (1, 0, RESPONSE),
        ],
        payload_table={(0, 1): payload_head, (1, 2): payload_mid},
        type_count=3,
    )
    return Scenario(
        topology=NetworkTopology(nodes, links), catalog=catalog, services=(svc,),
    )


def two_node_scenario(
    *,
    arrival: float = 1.0,
    bandwidth: float = 100.0,
    prop: float = 10e-6,
    payload: tuple[float, float] = (1000.0, 0.0),
) -> Scenario:
    """access(0) -- compute(1); one service with a single call 0->1."""
    nodes = [
        Node(0, NodeKind.USER_ACCESS, arrival_rates=(arrival,)),
        Node(1, NodeKind.COMPUTE, cpu_capacity=4.0, mem_capacity=4000.0),
    ]
    links = [Link(0, 1, bandwidth, prop)]
    catalog = (MicroserviceType(0, 0, 0, 1), MicroserviceType(1, 1.0, 100.0, 1))
    svc = compile_service(
        service_id=0,
        weight=1.0,
        sequence=[(0, 1, REQUEST), (1, 0, RESPONSE)],
        payload_table={(0, 1): payload},
        type_count=2,
    )
    return Scenario(
        topology=NetworkTopology(nodes, links), catalog=catalog, services=(svc,),
    )


def symmetric_pair_scenario() -> Scenario:
    """One access node with two identical compute nodes hanging off it."""
    nodes = [
        Node(0, NodeKind.USER_ACCESS, arrival_rates=(5.0,)),
        Node(1, NodeKind.COMPUTE, cpu_capacity=2.0, mem_capacity=2000.0),
        Node(2, NodeKind.COMPUTE, cpu_capacity=2.0, mem_capacity=2000.0),
    ]
    links = [Link(0, 1, 100.0, 10e-6), Link(0, 2, 100.0, 10e-6)]
    catalog = (MicroserviceType(0, 0, 0, 1), MicroserviceType(1, 1.0, 100.0, 1))
    svc = compile_service(
        service_id=0,
        weight=1.0,
        sequence=[(0, 1, REQUEST), (1, 0, RESPONSE)],
        payload_table={(0, 1): (20.0, 20.0)},
        type_count=2,
    )
    return Scenario(
        topology=NetworkTopology(nodes, links), catalog=catalog, services=(svc,),
    )


def ring_topology(n: int) -> NetworkTopology:
    nodes = [
        Node(0, NodeKind.USER_ACCESS, arrival_rates=(1.0,)),
    ] + [
        Node(i, NodeKind.ROUTING) for i in range(1, n)
    ]
    links = [Link(i, (i + 1) % n, 100.0, 10e-6) for i in range(n)]
    return NetworkTopology(nodes, links)


def random_balanced_sequence(rng: np.random.Generator, type_count: int, length: int):
    """Independent balanced-sequence sampler used by the recount tests."""
    chosen = [int(t) for t in rng.choice(
        np.arange(1, type_count), size=length, replace=False
    )]
    events = [(0, chosen[0], REQUEST)]

    def expand(t: int, remaining: list[int]) -> None:
        while remaining:
            child = remaining.pop(0)
            events.append((t, child, REQUEST))
            if remaining and rng.random() < 0.4:
                take = remaining[: int(rng.integers(0, len(remaining))) + 1]
                del remaining[: len(take)]
                expand(child, take)
            events.append((child, t, RESPONSE))

    expand(chosen[0], chosen[1:])
    events.append((chosen[0], 0, RESPONSE))
    return events
