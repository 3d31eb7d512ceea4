"""Exhaustive placement enumeration for small instances."""

from __future__ import annotations

import itertools
from math import comb, prod

import numpy as np

from .delay import DelayEvaluator
from .errors import SpaceTooLarge
from .model import Deployment, Scenario, pin_entry_type
from .routing import RoutingTable

DEFAULT_SIZE_GUARD = 10_000_000


def search_space_size(scenario: Scenario) -> int:
    ncmp = len(scenario.topology.compute_nodes)
    return prod(comb(ncmp, t.instance_count) for t in scenario.catalog[1:])


def brute_force_optimum(
    scenario: Scenario,
    routing: RoutingTable,
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> tuple[Deployment, float]:
    """Global minimum of the evaluator score over all feasible placements.

    Enumeration order is deterministic (combinations ascending per type), so
    ties return the lexicographically first argmin.
    """
    space = search_space_size(scenario)
    if space > size_guard:
        raise SpaceTooLarge(
            f"placement space has {space} points, guard is {size_guard}"
        )

    topo = scenario.topology
    compute = list(topo.compute_nodes)
    cpu_cap = np.array([topo.nodes[p].cpu_capacity for p in compute])
    mem_cap = np.array([topo.nodes[p].mem_capacity for p in compute])
    cpu_demand = [t.cpu_demand for t in scenario.catalog]
    mem_demand = [t.mem_demand for t in scenario.catalog]
    evaluator = DelayEvaluator(scenario, routing)

    per_type = [
        list(itertools.combinations(range(len(compute)), t.instance_count))
        for t in scenario.catalog[1:]
    ]
    best: tuple[Deployment, float] | None = None
    base = np.zeros((len(topo), scenario.type_count), dtype=bool)
    base = pin_entry_type(base, topo)
    for combo in itertools.product(*per_type):
        cpu = np.zeros(len(compute))
        mem = np.zeros(len(compute))
        for i, cols in enumerate(combo, start=1):
            for c in cols:
                cpu[c] += cpu_demand[i]
                mem[c] += mem_demand[i]
        if np.any(cpu > cpu_cap + 1e-9) or np.any(mem > mem_cap + 1e-9):
            continue
        g = base.copy()
        for i, cols in enumerate(combo, start=1):
            for c in cols:
                g[compute[c], i] = True
        deployment = Deployment(g)
        t = evaluator.evaluate(deployment).total
        if best is None or t < best[1]:
            best = (deployment, t)
    if best is None:
        raise SpaceTooLarge("no resource-feasible placement exists")
    return best
