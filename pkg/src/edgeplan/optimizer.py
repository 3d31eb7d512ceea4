"""Topology-aware genetic search over deployments, with greedy-seeded
"super individuals" to speed up convergence.

A chromosome is a (types x compute-nodes) bit matrix; entry type 0 is
pinned to the access nodes and excluded from the encoding.  Every
individual ever evaluated satisfies the instance-count and per-node
resource constraints by construction; link saturation is handled through
the evaluator's penalty score instead.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .delay import KB_TO_MB, DelayEvaluator, propagation_matrix
from .errors import InfeasibleScenario, ResourceExhausted
from .model import Deployment, Scenario, pin_entry_type
from .routing import RoutingTable

#: bounded attempts when rejection-sampling a random feasible chromosome
_RANDOM_ATTEMPTS = 1000


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    tournament_group_size: int = 5
    crossover_prob: float = 0.5
    mutation_prob: float = 0.05
    max_iterations: int = 1000
    stagnation_limit: int = 50
    super_individual_count: int = 4
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2 or self.population_size % 2:
            raise ValueError("population_size must be even and >= 2")
        if not 1 <= self.tournament_group_size <= self.population_size:
            raise ValueError("tournament_group_size out of range")
        for p in (self.crossover_prob, self.mutation_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")
        if self.super_individual_count >= self.population_size:
            raise ValueError("super_individual_count must be below population_size")
        if self.max_iterations < 1 or self.stagnation_limit < 1:
            raise ValueError("iteration limits must be positive")


@dataclass
class OptimizationTrace:
    best_t_per_iteration: list[float]
    best_deployment: Deployment
    best_t: float
    iterations: int
    termination: str  # "max_iterations" | "stagnation"


class _Encoding:
    """Maps chromosomes (bool (I, C) arrays) to deployments and back."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.compute_nodes = np.array(scenario.topology.compute_nodes, dtype=np.int64)
        self.gene_count = scenario.type_count - 1  # entry type excluded
        self.cpu_demand = np.array([t.cpu_demand for t in scenario.catalog[1:]])
        self.mem_demand = np.array([t.mem_demand for t in scenario.catalog[1:]])
        self.cpu_cap = np.array(
            [scenario.topology.nodes[p].cpu_capacity for p in self.compute_nodes]
        )
        self.mem_cap = np.array(
            [scenario.topology.nodes[p].mem_capacity for p in self.compute_nodes]
        )
        self.instance_counts = [t.instance_count for t in scenario.catalog[1:]]

    def feasible(self, chrom: np.ndarray) -> bool:
        cpu = self.cpu_demand @ chrom
        mem = self.mem_demand @ chrom
        return bool(np.all(cpu <= self.cpu_cap + 1e-9) and np.all(mem <= self.mem_cap + 1e-9))

    def to_deployment(self, chrom: np.ndarray) -> Deployment:
        topo = self.scenario.topology
        g = np.zeros((len(topo), self.scenario.type_count), dtype=bool)
        for gene, hosted in enumerate(chrom):
            g[self.compute_nodes[hosted], gene + 1] = True
        return Deployment(pin_entry_type(g, topo))

    def from_deployment(self, deployment: Deployment) -> np.ndarray:
        col = {int(p): c for c, p in enumerate(self.compute_nodes)}
        chrom = np.zeros((self.gene_count, len(self.compute_nodes)), dtype=bool)
        for i in range(1, self.scenario.type_count):
            for p in deployment.instance_nodes(i):
                chrom[i - 1, col[p]] = True
        return chrom

    def random_chromosome(self, rng: np.random.Generator) -> np.ndarray:
        for _ in range(_RANDOM_ATTEMPTS):
            chrom = np.zeros((self.gene_count, len(self.compute_nodes)), dtype=bool)
            cpu_left = self.cpu_cap.copy()
            mem_left = self.mem_cap.copy()
            ok = True
            for gene in rng.permutation(self.gene_count):
                need = self.instance_counts[gene]
                fits = np.nonzero(
                    (cpu_left >= self.cpu_demand[gene] - 1e-9)
                    & (mem_left >= self.mem_demand[gene] - 1e-9)
                )[0]
                if len(fits) < need:
                    ok = False
                    break
                chosen = rng.choice(fits, size=need, replace=False)
                chrom[gene, chosen] = True
                cpu_left[chosen] -= self.cpu_demand[gene]
                mem_left[chosen] -= self.mem_demand[gene]
            if ok:
                return chrom
        raise InfeasibleScenario(
            f"no feasible chromosome found in {_RANDOM_ATTEMPTS} attempts"
        )


def greedy_seed(
    scenario: Scenario, routing: RoutingTable, service_order: Sequence[int]
) -> Deployment:
    """Chain-greedy placement walking the services in the given order.

    The first undeployed microservice of a service goes on the compute nodes
    with the lowest mean idle-network delay to the access nodes; every later
    one goes nearest the nodes hosting its caller.  Idle delay is propagation
    plus payload over the nominal path bottleneck.
    """
    topo = scenario.topology
    vmat = propagation_matrix(topo, routing)
    n = len(topo)
    nominal_bottleneck = np.full((n, n), np.inf)
    for (p, q), path in routing.paths.items():
        if path:
            nominal_bottleneck[p, q] = min(topo.bandwidth(*h) for h in path)

    def idle_delay(src: int, dst: int, payload_kb: float) -> float:
        if src == dst:
            return 0.0
        return vmat[src, dst] + KB_TO_MB * payload_kb / nominal_bottleneck[src, dst]

    compute = list(topo.compute_nodes)
    cpu_left = {p: topo.nodes[p].cpu_capacity for p in compute}
    mem_left = {p: topo.nodes[p].mem_capacity for p in compute}
    placed: dict[int, list[int]] = {0: sorted(topo.access_nodes)}

    def place(mtype: int, anchors: Sequence[int], payload_kb: float) -> None:
        spec = scenario.catalog[mtype]
        scored = []
        for node in compute:
            if cpu_left[node] < spec.cpu_demand - 1e-9:
                continue
            if mem_left[node] < spec.mem_demand - 1e-9:
                continue
            mean_delay = sum(idle_delay(a, node, payload_kb) for a in anchors) / len(anchors)
            scored.append((mean_delay, node))
        if len(scored) < spec.instance_count:
            raise ResourceExhausted(
                f"cannot host {spec.instance_count} instances of type {mtype}"
            )
        scored.sort()
        chosen = [node for _, node in scored[: spec.instance_count]]
        for node in chosen:
            cpu_left[node] -= spec.cpu_demand
            mem_left[node] -= spec.mem_demand
        placed[mtype] = sorted(chosen)

    for k in service_order:
        svc = scenario.services[k]
        for frm, to, kind in svc.invocation_sequence:
            if kind != "req" or to in placed:
                continue
            if frm == 0:
                # service entry point: anchor on the access nodes
                place(to, sorted(topo.access_nodes), float(svc.payload_req[0, to]))
            else:
                place(to, placed[frm], float(svc.payload_req[frm, to]))

    # types no service invokes carry no traffic but still need their
    # instances somewhere feasible
    for mtype in range(1, scenario.type_count):
        if mtype not in placed:
            place(mtype, sorted(topo.access_nodes), 0.0)

    return Deployment.from_instance_nodes(n, scenario.type_count, placed)


def _distinct_orders(
    count: int, service_count: int, rng: np.random.Generator
) -> list[tuple[int, ...]]:
    orders: list[tuple[int, ...]] = [tuple(range(service_count))]
    attempts = 0
    while len(orders) < count and attempts < 1000:
        cand = tuple(int(x) for x in rng.permutation(service_count))
        if cand not in orders:
            orders.append(cand)
        attempts += 1
    return orders[:count]


def _evaluation_threads() -> int:
    raw = os.environ.get("EDGEPLAN_THREADS", "")
    if raw.strip():
        return max(1, int(raw))
    return os.cpu_count() or 1


def _run_ga(
    scenario: Scenario,
    config: GaConfig,
    score: Callable[[Deployment], float],
    seeds: Sequence[np.ndarray],
) -> OptimizationTrace:
    enc = _Encoding(scenario)
    rng = np.random.default_rng(config.rng_seed)

    population: list[np.ndarray] = [s.copy() for s in seeds[: config.population_size]]
    while len(population) < config.population_size:
        population.append(enc.random_chromosome(rng))

    cache: dict[bytes, float] = {}
    threads = _evaluation_threads()

    def fitness_of(pop: list[np.ndarray]) -> list[float]:
        pending = []
        for chrom in pop:
            key = chrom.tobytes()
            if key not in cache:
                cache[key] = float("nan")  # reserve slot, filled below
                pending.append((key, chrom))
        if pending:
            deployments = [enc.to_deployment(c) for _, c in pending]
            if threads > 1 and len(pending) > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    values = list(pool.map(score, deployments))
            else:
                values = [score(d) for d in deployments]
            for (key, _), val in zip(pending, values):
                cache[key] = val
        return [cache[c.tobytes()] for c in pop]

    best_chrom: np.ndarray | None = None
    best_key: tuple[float, bytes] | None = None
    stagnant = 0
    trace_t: list[float] = []
    termination = "max_iterations"
    iterations = 0

    for _ in range(config.max_iterations):
        iterations += 1
        fits = fitness_of(population)
        improved = False
        for chrom, t in zip(population, fits):
            key = (t, chrom.tobytes())
            if best_key is None or key < best_key:
                if best_key is None or t < best_key[0]:
                    improved = True
                best_key = key
                best_chrom = chrom.copy()
        trace_t.append(best_key[0])
        if improved:
            stagnant = 0
        else:
            stagnant += 1
            if stagnant >= config.stagnation_limit:
                termination = "stagnation"
                break
        if iterations == config.max_iterations:
            break

        offspring: list[np.ndarray] = []
        while len(offspring) < config.population_size:
            parents = []
            for _group in range(2):
                idx = rng.choice(
                    config.population_size, size=config.tournament_group_size, replace=False
                )
                winner = min(idx, key=lambda i: (fits[i], population[i].tobytes()))
                parents.append(population[winner])
            child_a = parents[0].copy()
            child_b = parents[1].copy()
            for gene in range(enc.gene_count):
                if rng.random() < config.crossover_prob:
                    child_a[gene], child_b[gene] = child_b[gene].copy(), child_a[gene].copy()
                    if not (enc.feasible(child_a) and enc.feasible(child_b)):
                        child_a[gene], child_b[gene] = child_b[gene].copy(), child_a[gene].copy()
            for child in (child_a, child_b):
                _mutate(child, enc, config.mutation_prob, rng)
            offspring.append(child_a)
            offspring.append(child_b)
        population = offspring[: config.population_size]

    assert best_chrom is not None and best_key is not None
    return OptimizationTrace(
        best_t_per_iteration=trace_t,
        best_deployment=enc.to_deployment(best_chrom),
        best_t=best_key[0],
        iterations=iterations,
        termination=termination,
    )


def _mutate(
    chrom: np.ndarray, enc: _Encoding, prob: float, rng: np.random.Generator
) -> None:
    """Move one instance of a gene to another feasible node, preserving counts."""
    for gene in range(enc.gene_count):
        if rng.random() >= prob:
            continue
        ones = np.nonzero(chrom[gene])[0]
        if not len(ones):
            continue
        src = int(rng.choice(ones))
        cpu_used = enc.cpu_demand @ chrom
        mem_used = enc.mem_demand @ chrom
        candidates = np.nonzero(
            (~chrom[gene])
            & (cpu_used + enc.cpu_demand[gene] <= enc.cpu_cap + 1e-9)
            & (mem_used + enc.mem_demand[gene] <= enc.mem_cap + 1e-9)
        )[0]
        if not len(candidates):
            continue
        dst = int(rng.choice(candidates))
        chrom[gene, src] = False
        chrom[gene, dst] = True


def optimize(
    scenario: Scenario, routing: RoutingTable, config: GaConfig
) -> OptimizationTrace:
    """Full search: greedy-seeded super individuals plus random population."""
    rng = np.random.default_rng(config.rng_seed)
    enc = _Encoding(scenario)
    seeds: list[np.ndarray] = []
    if config.super_individual_count > 0:
        orders = _distinct_orders(
            config.super_individual_count, len(scenario.services), rng
        )
        for order in orders:
            seeds.append(enc.from_deployment(greedy_seed(scenario, routing, order)))
    evaluator = DelayEvaluator(scenario, routing)
    return _run_ga(scenario, config, lambda d: evaluator.evaluate(d).total, seeds)


def optimize_without_ia(
    scenario: Scenario, routing: RoutingTable, config: GaConfig
) -> OptimizationTrace:
    """Ablation: same search without the greedy-seeded individuals."""
    from dataclasses import replace

    return optimize(scenario, routing, replace(config, super_individual_count=0))
