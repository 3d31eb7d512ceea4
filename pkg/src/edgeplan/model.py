"""Core domain types: topology, microservice catalog, services, deployments.

Conventions used throughout the package:
  * node ids are dense 0..N-1
  * microservice type 0 is the virtual entry point pinned to user-access
    nodes; it consumes no resources
  * payloads are kilobytes, bandwidth is Mb/s, rates are 1/s, delays are
    seconds
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, UnbalancedSequence, UnknownType

REQUEST = "req"
RESPONSE = "res"


class NodeKind(Enum):
    USER_ACCESS = "access"
    ROUTING = "routing"
    COMPUTE = "compute"


@dataclass(frozen=True)
class Node:
    id: int
    kind: NodeKind
    cpu_capacity: float = 0.0
    mem_capacity: float = 0.0
    #: per-service Poisson arrival rates, non-empty only on access nodes
    arrival_rates: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind is NodeKind.COMPUTE:
            if self.cpu_capacity <= 0 or self.mem_capacity <= 0:
                raise ValueError(f"compute node {self.id} needs positive capacities")
        else:
            if self.cpu_capacity or self.mem_capacity:
                raise ValueError(f"non-compute node {self.id} must have zero capacity")
        if self.kind is NodeKind.USER_ACCESS:
            if not self.arrival_rates:
                raise ValueError(f"access node {self.id} needs arrival rates")
            if any(r < 0 for r in self.arrival_rates):
                raise ValueError(f"negative arrival rate on node {self.id}")
        elif self.arrival_rates:
            raise ValueError(f"non-access node {self.id} cannot carry arrival rates")


@dataclass(frozen=True)
class Link:
    a: int
    b: int
    bandwidth: float        # Mb/s, each direction (full duplex)
    propagation_delay: float  # seconds

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("link endpoints must differ")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.propagation_delay < 0:
            raise ValueError("propagation delay must be nonnegative")


class NetworkTopology:
    """Immutable node/link graph with adjacency lookups."""

    def __init__(self, nodes: Sequence[Node], links: Sequence[Link]):
        nodes = tuple(sorted(nodes, key=lambda n: n.id))
        if [n.id for n in nodes] != list(range(len(nodes))):
            raise ValueError("node ids must be dense 0..N-1 and unique")
        seen: set[tuple[int, int]] = set()
        for ln in links:
            key = (min(ln.a, ln.b), max(ln.a, ln.b))
            if key in seen:
                raise ValueError(f"duplicate link {key}")
            if ln.a >= len(nodes) or ln.b >= len(nodes):
                raise ValueError(f"link {key} references unknown node")
            seen.add(key)
        self.nodes = nodes
        self.links = tuple(links)
        adj: dict[int, set[int]] = {n.id: set() for n in nodes}
        bw: dict[tuple[int, int], float] = {}
        prop: dict[tuple[int, int], float] = {}
        for ln in links:
            adj[ln.a].add(ln.b)
            adj[ln.b].add(ln.a)
            for d in ((ln.a, ln.b), (ln.b, ln.a)):
                bw[d] = ln.bandwidth
                prop[d] = ln.propagation_delay
        self.adjacency = {p: frozenset(s) for p, s in adj.items()}
        self._bandwidth = bw
        self._propagation = prop

    def __len__(self) -> int:
        return len(self.nodes)

    def bandwidth(self, x: int, y: int) -> float:
        return self._bandwidth[(x, y)]

    def propagation(self, x: int, y: int) -> float:
        return self._propagation[(x, y)]

    def nodes_of_kind(self, kind: NodeKind) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if n.kind is kind)

    @property
    def access_nodes(self) -> tuple[int, ...]:
        return self.nodes_of_kind(NodeKind.USER_ACCESS)

    @property
    def compute_nodes(self) -> tuple[int, ...]:
        return self.nodes_of_kind(NodeKind.COMPUTE)

    def directed_links(self) -> list[tuple[int, int]]:
        out = []
        for ln in self.links:
            out.append((ln.a, ln.b))
            out.append((ln.b, ln.a))
        return sorted(out)


@dataclass(frozen=True)
class MicroserviceType:
    id: int
    cpu_demand: float
    mem_demand: float
    instance_count: int

    def __post_init__(self):
        if self.cpu_demand < 0 or self.mem_demand < 0:
            raise ValueError("resource demands must be nonnegative")
        if self.instance_count < 1:
            raise ValueError("instance_count must be >= 1")
        if self.id == 0 and (self.cpu_demand or self.mem_demand):
            raise ValueError("the entry type (id 0) is resource-free")


#: one invocation event: (from_type, to_type, REQUEST | RESPONSE)
Event = tuple[int, int, str]


@dataclass(frozen=True)
class ServiceSpec:
    id: int
    weight: float
    invocation_sequence: tuple[Event, ...]
    request_matrix: np.ndarray   # (T, T) ints, entry [i, j] = calls i -> j
    payload_req: np.ndarray      # (T, T) KB per request i -> j
    payload_res: np.ndarray      # (T, T) KB per response i -> j

    @property
    def response_matrix(self) -> np.ndarray:
        return self.request_matrix.T

    def called_types(self) -> tuple[int, ...]:
        """Types invoked by this service, in first-request order (entry excluded)."""
        out: list[int] = []
        for frm, to, kind in self.invocation_sequence:
            if kind == REQUEST and to not in out:
                out.append(to)
        return tuple(out)


def compile_service(
    service_id: int,
    weight: float,
    sequence: Sequence[Event],
    payload_table: Mapping[tuple[int, int], tuple[float, float]],
    type_count: int,
) -> ServiceSpec:
    """Turn an ordered invocation event list into matrix form.

    ``payload_table`` maps a call edge (caller, callee) to its
    (request KB, response KB) sizes.  The sequence must be a properly
    nested call trace: it opens with a request from type 0 and every
    request is eventually answered, innermost first.
    """
    if not sequence:
        raise UnbalancedSequence("empty invocation sequence")
    for frm, to, kind in sequence:
        if not (0 <= frm < type_count and 0 <= to < type_count):
            raise UnknownType(f"event ({frm},{to},{kind}) references unknown type")
        if kind not in (REQUEST, RESPONSE):
            raise ValueError(f"bad event direction {kind!r}")
        if frm == to:
            raise UnbalancedSequence(f"self-call ({frm},{to})")
    first = sequence[0]
    if first[2] != REQUEST or first[0] != 0:
        raise UnbalancedSequence("sequence must start with a request from type 0")

    req = np.zeros((type_count, type_count), dtype=np.int64)
    stack: list[tuple[int, int]] = []
    for frm, to, kind in sequence:
        if kind == REQUEST:
            if stack and frm != stack[-1][1]:
                raise UnbalancedSequence(
                    f"request ({frm},{to}) issued while {stack[-1]} is active"
                )
            if not stack and frm != 0:
                raise UnbalancedSequence(f"top-level request from non-entry type {frm}")
            stack.append((frm, to))
            req[frm, to] += 1
        else:
            if not stack or stack[-1] != (to, frm):
                raise UnbalancedSequence(f"response ({frm},{to}) without open request")
            stack.pop()
    if stack:
        raise UnbalancedSequence(f"unterminated requests: {stack}")

    d_req = np.zeros((type_count, type_count), dtype=float)
    d_res = np.zeros((type_count, type_count), dtype=float)
    for (i, j), (kb_req, kb_res) in payload_table.items():
        if not (0 <= i < type_count and 0 <= j < type_count):
            raise UnknownType(f"payload entry ({i},{j}) references unknown type")
        if kb_req < 0 or kb_res < 0:
            raise ValueError("payload sizes must be nonnegative")
        d_req[i, j] = kb_req
        d_res[j, i] = kb_res  # callee answers the caller
    missing = [(i, j) for i, j in zip(*np.nonzero(req)) if (int(i), int(j)) not in payload_table]
    if missing:
        raise ValueError(f"no payload entry for call edges {missing}")

    return ServiceSpec(
        id=service_id,
        weight=weight,
        invocation_sequence=tuple(sequence),
        request_matrix=req,
        payload_req=d_req,
        payload_res=d_res,
    )


@dataclass(frozen=True)
class Scenario:
    topology: NetworkTopology
    catalog: tuple[MicroserviceType, ...]
    services: tuple[ServiceSpec, ...]
    packet_size: float = 1.0   # KB; carried for completeness, cancels out of the queueing term
    rng_seed: int = 0

    def __post_init__(self):
        if [t.id for t in self.catalog] != list(range(len(self.catalog))):
            raise ValueError("catalog ids must be dense 0..I")
        if self.catalog[0].instance_count != len(self.topology.access_nodes):
            raise ValueError("entry type must have one instance per access node")
        t = len(self.catalog)
        for svc in self.services:
            if svc.request_matrix.shape != (t, t):
                raise DimensionMismatch(
                    f"service {svc.id} matrix shape {svc.request_matrix.shape}, expected {(t, t)}"
                )
        if sum(s.weight for s in self.services) <= 0:
            raise ValueError("service weights must sum to a positive value")
        for n in self.topology.nodes:
            if n.kind is NodeKind.USER_ACCESS and len(n.arrival_rates) != len(self.services):
                raise DimensionMismatch(
                    f"node {n.id} has {len(n.arrival_rates)} arrival rates for "
                    f"{len(self.services)} services"
                )

    @property
    def type_count(self) -> int:
        return len(self.catalog)

    def aggregate_arrival(self, k: int) -> float:
        """Total arrival rate of service ``k`` over all access nodes."""
        return sum(
            n.arrival_rates[k]
            for n in self.topology.nodes
            if n.kind is NodeKind.USER_ACCESS
        )


class Deployment:
    """Binary node-by-type placement with the derived instance -> node map."""

    def __init__(self, placement: np.ndarray):
        placement = np.asarray(placement, dtype=bool)
        if placement.ndim != 2:
            raise DimensionMismatch("placement must be a 2-D matrix")
        self.placement = placement
        self.placement.setflags(write=False)

    @classmethod
    def from_instance_nodes(
        cls, node_count: int, type_count: int, nodes_per_type: Mapping[int, Iterable[int]]
    ) -> "Deployment":
        g = np.zeros((node_count, type_count), dtype=bool)
        for i, nodes in nodes_per_type.items():
            for p in nodes:
                g[p, i] = True
        return cls(g)

    def instance_nodes(self, i: int) -> tuple[int, ...]:
        """Nodes hosting type ``i``, ascending node id; index a = instance a."""
        return tuple(int(p) for p in np.nonzero(self.placement[:, i])[0])

    def __eq__(self, other) -> bool:
        return isinstance(other, Deployment) and np.array_equal(self.placement, other.placement)

    def __hash__(self) -> int:
        return hash(self.placement.tobytes())


def pin_entry_type(placement: np.ndarray, topology: NetworkTopology) -> np.ndarray:
    """Force column 0 of a placement matrix to the access nodes."""
    placement = np.array(placement, dtype=bool)
    placement[:, 0] = False
    for p in topology.access_nodes:
        placement[p, 0] = True
    return placement


@dataclass(frozen=True)
class Violation:
    kind: str          # "instance_count" | "placement" | "cpu" | "mem" | "entry_pin"
    node: int | None
    mservice: int | None
    amount: float
    message: str


@dataclass(frozen=True)
class ValidationResult:
    feasible: bool
    violations: tuple[Violation, ...] = ()


def validate_deployment(deployment: Deployment, scenario: Scenario) -> ValidationResult:
    """Check instance counts, placement rules, and node resource limits.

    Link saturation is deliberately not checked here; it needs the traffic
    model and is reported by the evaluator.
    """
    topo = scenario.topology
    g = deployment.placement
    if g.shape != (len(topo), scenario.type_count):
        raise DimensionMismatch(
            f"placement shape {g.shape}, expected {(len(topo), scenario.type_count)}"
        )
    violations: list[Violation] = []

    access = set(topo.access_nodes)
    for p in range(len(topo)):
        pinned = bool(g[p, 0])
        if pinned != (p in access):
            violations.append(Violation(
                "entry_pin", p, 0, 1.0,
                f"entry type must sit on exactly the access nodes; node {p} wrong",
            ))

    compute = set(topo.compute_nodes)
    for i in range(1, scenario.type_count):
        hosts = deployment.instance_nodes(i)
        want = scenario.catalog[i].instance_count
        if len(hosts) != want:
            violations.append(Violation(
                "instance_count", None, i, float(len(hosts) - want),
                f"type {i} has {len(hosts)} instances, needs exactly {want}",
            ))
        for p in hosts:
            if p not in compute:
                violations.append(Violation(
                    "placement", p, i, 1.0,
                    f"type {i} placed on non-compute node {p}",
                ))

    cpu_d = np.array([t.cpu_demand for t in scenario.catalog])
    mem_d = np.array([t.mem_demand for t in scenario.catalog])
    for p in range(len(topo)):
        node = topo.nodes[p]
        used_cpu = float(g[p] @ cpu_d)
        used_mem = float(g[p] @ mem_d)
        if used_cpu > node.cpu_capacity + 1e-9:
            violations.append(Violation(
                "cpu", p, None, used_cpu - node.cpu_capacity,
                f"node {p} CPU over by {used_cpu - node.cpu_capacity:g}",
            ))
        if used_mem > node.mem_capacity + 1e-9:
            violations.append(Violation(
                "mem", p, None, used_mem - node.mem_capacity,
                f"node {p} memory over by {used_mem - node.mem_capacity:g}",
            ))

    return ValidationResult(feasible=not violations, violations=tuple(violations))
