"""Experiment sweeps: regenerate or rescale scenarios along one axis, run
each scheme, and tabulate real-topology delays with improvement percentages.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from .baselines import FlatNetworkModel, ga_blind, greedy_baseline, random_deploy
from .delay import evaluate
from .errors import EdgeplanError
from .generate import GeneratorParams, generate_scenario, scale_arrival_rates, scale_bandwidth
from .model import Deployment, Scenario
from .optimizer import GaConfig, optimize, optimize_without_ia
from .routing import build_routing

AXES = ("bandwidth", "arrival", "cpu", "lfl")
SCHEMES = ("topo-ga", "topo-ga-noseed", "random", "greedy", "ga-blind")


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple[float, ...]
    schemes: tuple[str, ...] = SCHEMES
    seeds: tuple[int, ...] = (0,)
    ga_config: GaConfig = field(default_factory=GaConfig)
    #: write wall_ms as 0 so outputs are byte-reproducible
    stable_timing: bool = False

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}")
        if not self.values or not self.schemes or not self.seeds:
            raise ValueError("values, schemes, and seeds must be non-empty")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")


@dataclass(frozen=True)
class SweepRow:
    axis: str
    value: float
    seed: int
    scheme: str
    t_seconds: float | None     # None marks a failed cell
    iterations: int
    wall_ms: float
    congested: bool


def improvement_pct(t_a: float, t_b: float) -> float:
    """Delay improvement of scheme A over scheme B, in percent."""
    return (t_b - t_a) / t_b * 100.0


def _scenario_for(spec: SweepSpec, params: GeneratorParams, value: float, seed: int) -> Scenario:
    params = replace(params, rng_seed=seed)
    if spec.axis == "bandwidth":
        return scale_bandwidth(generate_scenario(params), value)
    if spec.axis == "arrival":
        return scale_arrival_rates(generate_scenario(params), value)
    if spec.axis == "cpu":
        return generate_scenario(replace(params, node_cpu=value))
    return generate_scenario(replace(params, target_avg_lfl=value))


def _run_scheme(
    scheme: str, scenario: Scenario, ga_config: GaConfig, seed: int
) -> tuple[Deployment, int]:
    routing = build_routing(scenario.topology)
    config = replace(ga_config, rng_seed=seed)
    if scheme == "topo-ga":
        trace = optimize(scenario, routing, config)
        return trace.best_deployment, trace.iterations
    if scheme == "topo-ga-noseed":
        trace = optimize_without_ia(scenario, routing, config)
        return trace.best_deployment, trace.iterations
    if scheme == "random":
        return random_deploy(scenario, seed), 0
    if scheme == "greedy":
        return greedy_baseline(scenario, routing), 0
    flat = FlatNetworkModel(
        propagation_delay=scenario.topology.links[0].propagation_delay,
        bandwidth=scenario.topology.links[0].bandwidth,
    )
    trace = ga_blind(scenario, flat, config)
    return trace.best_deployment, trace.iterations


def run_sweep(spec: SweepSpec, params: GeneratorParams) -> list[SweepRow]:
    rows: list[SweepRow] = []
    for value in spec.values:
        for seed in spec.seeds:
            try:
                scenario = _scenario_for(spec, params, value, seed)
            except EdgeplanError:
                for scheme in spec.schemes:
                    rows.append(SweepRow(spec.axis, value, seed, scheme,
                                         None, 0, 0.0, False))
                continue
            routing = build_routing(scenario.topology)
            for scheme in spec.schemes:
                start = time.perf_counter()
                try:
                    deployment, iterations = _run_scheme(
                        scheme, scenario, spec.ga_config, seed
                    )
                    report = evaluate(scenario, deployment, routing)
                except EdgeplanError:
                    rows.append(SweepRow(spec.axis, value, seed, scheme,
                                         None, 0, 0.0, False))
                    continue
                wall_ms = 0.0 if spec.stable_timing else (
                    (time.perf_counter() - start) * 1000.0
                )
                rows.append(SweepRow(
                    spec.axis, value, seed, scheme,
                    report.total, iterations, wall_ms, report.congested,
                ))
    return rows


def write_sweep_csv(rows: list[SweepRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "axis", "value", "seed", "scheme", "T_seconds", "iterations",
            "wall_ms", "congested",
        ])
        for r in rows:
            writer.writerow([
                r.axis, repr(r.value), r.seed, r.scheme,
                "failed" if r.t_seconds is None else repr(r.t_seconds),
                r.iterations, repr(r.wall_ms), int(r.congested),
            ])


def write_sweep_summary(rows: list[SweepRow], path: str | Path) -> None:
    """Per-cell mean/stddev plus pairwise improvement percentages of means."""
    cells: dict[tuple[float, str], list[float]] = {}
    for r in rows:
        if r.t_seconds is not None:
            cells.setdefault((r.value, r.scheme), []).append(r.t_seconds)
    values = sorted({v for v, _ in cells})
    schemes = sorted({s for _, s in cells})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["axis_value", "scheme", "mean_T", "std_T", "n"])
        for v in values:
            for s in schemes:
                ts = cells.get((v, s))
                if not ts:
                    continue
                std = statistics.pstdev(ts) if len(ts) > 1 else 0.0
                writer.writerow([repr(v), s, repr(statistics.fmean(ts)), repr(std), len(ts)])
        writer.writerow([])
        writer.writerow(["axis_value", "scheme_a", "scheme_b", "improvement_pct"])
        for v in values:
            for sa in schemes:
                for sb in schemes:
                    if sa == sb:
                        continue
                    ta, tb = cells.get((v, sa)), cells.get((v, sb))
                    if not ta or not tb:
                        continue
                    mean_b = statistics.fmean(tb)
                    if mean_b <= 0:
                        continue
                    writer.writerow([
                        repr(v), sa, sb,
                        repr(improvement_pct(statistics.fmean(ta), mean_b)),
                    ])
