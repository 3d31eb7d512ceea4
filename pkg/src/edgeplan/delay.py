"""Three-tier traffic model: deployment -> link traffic -> weighted delay.

The evaluation pipeline follows a fixed sequence: instance invocation
probabilities, instance-pair request/response frequencies and volumes,
per-node direct traffic, per-link total traffic, residual bandwidth, and
finally per-service delays.  Everything here is a pure function of
(scenario, deployment, routing); concurrent evaluations over shared
read-only inputs are safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleDeployment, ZeroAggregateArrival
from .model import Deployment, NetworkTopology, Scenario, validate_deployment
from .routing import Hop, RoutingTable

#: kilobytes -> megabits
KB_TO_MB = 8.0 / 1000.0

#: score assigned to deployments that saturate a link, plus overload ratios,
#: so the optimizer can still rank them
PENALTY_BASE = 1.0e6


@dataclass(frozen=True)
class InstanceLayout:
    """Flat indexing of all microservice instances for one deployment.

    Instance ``a`` of type ``i`` is the ``a``-th node (ascending id) hosting
    that type; entry-type instances live on the access nodes.
    """
    inst_type: np.ndarray   # (T,) type id per instance
    inst_node: np.ndarray   # (T,) node id per instance
    offsets: tuple[int, ...]  # start index of each type's instance block

    @classmethod
    def build(cls, scenario: Scenario, deployment: Deployment) -> "InstanceLayout":
        types: list[int] = []
        nodes: list[int] = []
        offsets: list[int] = []
        for i in range(scenario.type_count):
            offsets.append(len(types))
            for p in deployment.instance_nodes(i):
                types.append(i)
                nodes.append(p)
        return cls(
            inst_type=np.array(types, dtype=np.int64),
            inst_node=np.array(nodes, dtype=np.int64),
            offsets=tuple(offsets),
        )

    def instances_of(self, i: int) -> range:
        end = self.offsets[i + 1] if i + 1 < len(self.offsets) else len(self.inst_type)
        return range(self.offsets[i], end)


@dataclass(frozen=True)
class InvocationProbabilities:
    layout: InstanceLayout
    #: per service: probability vector over all instances
    per_service: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class ServiceFlows:
    """Instance-pair frequencies and data volumes for one service."""
    request_freq: np.ndarray   # (T, T) calls per execution
    response_freq: np.ndarray  # transpose of request_freq
    request_kb: np.ndarray     # (T, T) KB per execution
    response_kb: np.ndarray


@dataclass(frozen=True)
class TrafficMatrix:
    direct: np.ndarray                 # (N, N) Mb/s between node pairs
    link_total: dict[Hop, float]       # Mb/s per directed link


@dataclass(frozen=True)
class ResidualBandwidth:
    residual: dict[Hop, float]   # Mb/s per directed link, nominal minus load
    bottleneck: np.ndarray       # (N, N) min residual along each routing path


@dataclass(frozen=True)
class DelayReport:
    per_service: tuple[float, ...]
    total: float
    congested: bool
    saturated_links: tuple[Hop, ...]
    traffic: TrafficMatrix
    residual: ResidualBandwidth


def instance_probabilities(
    scenario: Scenario, deployment: Deployment
) -> InvocationProbabilities:
    """Round-robin selection for regular types; arrival-rate share for type 0."""
    layout = InstanceLayout.build(scenario, deployment)
    base = np.zeros(len(layout.inst_type))
    for i in range(1, scenario.type_count):
        idx = layout.instances_of(i)
        if len(idx):
            base[idx] = 1.0 / len(idx)

    per_service: list[np.ndarray] = []
    for k, _svc in enumerate(scenario.services):
        lam_total = scenario.aggregate_arrival(k)
        if lam_total <= 0:
            raise ZeroAggregateArrival(f"service {k} has zero aggregate arrival rate")
        probs = base.copy()
        for t in layout.instances_of(0):
            node = scenario.topology.nodes[int(layout.inst_node[t])]
            probs[t] = node.arrival_rates[k] / lam_total
        per_service.append(probs)
    return InvocationProbabilities(layout=layout, per_service=tuple(per_service))


def pairwise_flows(
    scenario: Scenario, deployment: Deployment, probs: InvocationProbabilities
) -> tuple[ServiceFlows, ...]:
    layout = probs.layout
    it = layout.inst_type
    out: list[ServiceFlows] = []
    for k, svc in enumerate(scenario.services):
        p = probs.per_service[k]
        type_req = svc.request_matrix[np.ix_(it, it)]
        freq = np.outer(p, p) * type_req
        d_req = svc.payload_req[np.ix_(it, it)]
        d_res = svc.payload_res[np.ix_(it, it)]
        resp = freq.T
        out.append(ServiceFlows(
            request_freq=freq,
            response_freq=resp,
            request_kb=freq * d_req,
            response_kb=resp * d_res,
        ))
    return tuple(out)


def traffic(
    scenario: Scenario,
    deployment: Deployment,
    flows: tuple[ServiceFlows, ...],
    routing: RoutingTable,
    layout: InstanceLayout | None = None,
) -> TrafficMatrix:
    layout = layout or InstanceLayout.build(scenario, deployment)
    n = len(scenario.topology)
    t = len(layout.inst_type)
    agg = np.zeros((n, t))
    agg[layout.inst_node, np.arange(t)] = 1.0

    direct = np.zeros((n, n))
    for k in range(len(scenario.services)):
        kb_per_exec = flows[k].request_kb + flows[k].response_kb
        lam = scenario.aggregate_arrival(k)
        direct += lam * (agg @ kb_per_exec @ agg.T)
    direct *= KB_TO_MB

    link_total: dict[Hop, float] = {h: 0.0 for h in scenario.topology.directed_links()}
    for p in range(n):
        for q in range(n):
            s = direct[p, q]
            if p == q or s == 0.0:
                continue
            for hop in routing.path(p, q):
                link_total[hop] += s
    return TrafficMatrix(direct=direct, link_total=link_total)


def residual_bandwidth(
    topology: NetworkTopology, traffic_matrix: TrafficMatrix, routing: RoutingTable
) -> ResidualBandwidth:
    residual = {
        hop: topology.bandwidth(*hop) - load
        for hop, load in traffic_matrix.link_total.items()
    }
    n = len(topology)
    bottleneck = np.full((n, n), np.inf)
    for (p, q), path in routing.paths.items():
        if path:
            bottleneck[p, q] = min(residual[h] for h in path)
    return ResidualBandwidth(residual=residual, bottleneck=bottleneck)


def propagation_matrix(topology: NetworkTopology, routing: RoutingTable) -> np.ndarray:
    """Total propagation delay along every routing path."""
    n = len(topology)
    v = np.zeros((n, n))
    for (p, q), path in routing.paths.items():
        v[p, q] = sum(topology.propagation(*h) for h in path)
    return v


def evaluate(
    scenario: Scenario,
    deployment: Deployment,
    routing: RoutingTable,
    *,
    check_feasibility: bool = True,
    _vmat: np.ndarray | None = None,
) -> DelayReport:
    """Full deployment evaluation: traffic, residual bandwidth, weighted delay.

    When any directed link carries at least its nominal bandwidth the
    deployment violates the bandwidth constraint; its score becomes
    PENALTY_BASE plus the summed overload ratios so that infeasible
    deployments still rank against each other.
    """
    if check_feasibility:
        verdict = validate_deployment(deployment, scenario)
        if not verdict.feasible:
            raise InfeasibleDeployment(
                "; ".join(v.message for v in verdict.violations[:5])
            )

    topo = scenario.topology
    probs = instance_probabilities(scenario, deployment)
    layout = probs.layout
    flows = pairwise_flows(scenario, deployment, probs)
    traffic_matrix = traffic(scenario, deployment, flows, routing, layout)
    residual = residual_bandwidth(topo, traffic_matrix, routing)

    saturated = tuple(
        hop for hop, load in sorted(traffic_matrix.link_total.items())
        if load >= topo.bandwidth(*hop)
    )
    if saturated:
        overload = sum(
            max(0.0, traffic_matrix.link_total[h] / topo.bandwidth(*h) - 1.0)
            for h in traffic_matrix.link_total
        )
        total = PENALTY_BASE + overload
        per_service = tuple(float("nan") for _ in scenario.services)
        return DelayReport(
            per_service=per_service, total=total, congested=True,
            saturated_links=saturated, traffic=traffic_matrix, residual=residual,
        )

    vmat = _vmat if _vmat is not None else propagation_matrix(topo, routing)
    nodes = layout.inst_node
    v_pairs = vmat[np.ix_(nodes, nodes)]
    with np.errstate(divide="ignore"):
        inv_bottleneck = 1.0 / residual.bottleneck[np.ix_(nodes, nodes)]
    distinct = nodes[:, None] != nodes[None, :]
    v_pairs = np.where(distinct, v_pairs, 0.0)
    inv_bottleneck = np.where(distinct, inv_bottleneck, 0.0)

    per_service: list[float] = []
    for k in range(len(scenario.services)):
        f = flows[k]
        tk = float(
            np.sum((f.request_freq + f.response_freq) * v_pairs)
            + KB_TO_MB * np.sum((f.request_kb + f.response_kb) * inv_bottleneck)
        )
        per_service.append(tk)
    total = float(sum(
        svc.weight * tk for svc, tk in zip(scenario.services, per_service)
    ))
    return DelayReport(
        per_service=tuple(per_service), total=total, congested=False,
        saturated_links=(), traffic=traffic_matrix, residual=residual,
    )


class DelayEvaluator:
    """Caches routing-derived arrays for repeated evaluations (optimizer hot path)."""

    def __init__(self, scenario: Scenario, routing: RoutingTable):
        self.scenario = scenario
        self.routing = routing
        self._vmat = propagation_matrix(scenario.topology, routing)

    def evaluate(self, deployment: Deployment, *, check_feasibility: bool = False) -> DelayReport:
        return evaluate(
            self.scenario, deployment, self.routing,
            check_feasibility=check_feasibility, _vmat=self._vmat,
        )
