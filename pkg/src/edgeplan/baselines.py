"""Comparison schemes: random placement, chain-greedy, and a
topology-blind GA that scores deployments against a flat network model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .delay import KB_TO_MB, InstanceLayout, instance_probabilities, pairwise_flows
from .errors import ResourceExhausted
from .model import Deployment, Scenario, pin_entry_type
from .optimizer import GaConfig, OptimizationTrace, _Encoding, _run_ga, greedy_seed
from .routing import RoutingTable

_RANDOM_RETRIES = 100


@dataclass(frozen=True)
class FlatNetworkModel:
    """Uniform pairwise delay/bandwidth with no link sharing and no topology."""
    propagation_delay: float = 10e-6   # seconds
    bandwidth: float = 100.0           # Mb/s

    def __post_init__(self):
        if self.propagation_delay <= 0 or self.bandwidth <= 0:
            raise ValueError("flat model parameters must be positive")


def random_deploy(scenario: Scenario, seed: int) -> Deployment:
    """Uniform placement over nodes with sufficient remaining resources."""
    rng = np.random.default_rng(seed)
    topo = scenario.topology
    for _ in range(_RANDOM_RETRIES):
        cpu_left = {p: topo.nodes[p].cpu_capacity for p in topo.compute_nodes}
        mem_left = {p: topo.nodes[p].mem_capacity for p in topo.compute_nodes}
        placed: dict[int, list[int]] = {0: sorted(topo.access_nodes)}
        ok = True
        for mtype in scenario.catalog[1:]:
            fits = sorted(
                p for p in cpu_left
                if cpu_left[p] >= mtype.cpu_demand - 1e-9
                and mem_left[p] >= mtype.mem_demand - 1e-9
            )
            if len(fits) < mtype.instance_count:
                ok = False
                break
            chosen = rng.choice(fits, size=mtype.instance_count, replace=False)
            for p in chosen:
                cpu_left[p] -= mtype.cpu_demand
                mem_left[p] -= mtype.mem_demand
            placed[mtype.id] = sorted(int(p) for p in chosen)
        if ok:
            return Deployment.from_instance_nodes(
                len(topo), scenario.type_count, placed
            )
    raise ResourceExhausted(
        f"random placement failed after {_RANDOM_RETRIES} attempts"
    )


def greedy_baseline(scenario: Scenario, routing: RoutingTable) -> Deployment:
    """Chain-greedy placement with the canonical (ascending) service order."""
    return greedy_seed(scenario, routing, range(len(scenario.services)))


def flat_evaluate(
    scenario: Scenario, deployment: Deployment, model: FlatNetworkModel
) -> float:
    """Weighted delay under the flat model: every cross-node instance pair
    costs the uniform propagation delay plus payload over the uniform
    bandwidth.  Deliberately blind to links, routing, and sharing.
    """
    probs = instance_probabilities(scenario, deployment)
    layout = probs.layout
    flows = pairwise_flows(scenario, deployment, probs)
    nodes = layout.inst_node
    distinct = (nodes[:, None] != nodes[None, :]).astype(float)
    total = 0.0
    for svc, f in zip(scenario.services, flows):
        tk = float(
            np.sum((f.request_freq + f.response_freq) * distinct) * model.propagation_delay
            + KB_TO_MB * np.sum((f.request_kb + f.response_kb) * distinct) / model.bandwidth
        )
        total += svc.weight * tk
    return total


def ga_blind(
    scenario: Scenario, flat_model: FlatNetworkModel, config: GaConfig
) -> OptimizationTrace:
    """Topology-blind GA: same loop as the optimizer, no super individuals,
    fitness under the flat model.  Re-score the returned deployment with the
    real evaluator when comparing schemes.
    """
    return _run_ga(
        scenario, config, lambda d: flat_evaluate(scenario, d, flat_model), seeds=[]
    )
