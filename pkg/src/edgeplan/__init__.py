"""Topology-aware microservice placement: traffic model, delay evaluator,
genetic optimizer, baselines, and experiment harness."""

from .baselines import FlatNetworkModel, ga_blind, greedy_baseline, random_deploy
from .delay import (
    DelayReport,
    evaluate,
    instance_probabilities,
    pairwise_flows,
    residual_bandwidth,
    traffic,
)
from .generate import PRESETS, GeneratorParams, generate_scenario
from .model import (
    Deployment,
    Link,
    MicroserviceType,
    NetworkTopology,
    Node,
    NodeKind,
    Scenario,
    ServiceSpec,
    compile_service,
    validate_deployment,
)
from .optimizer import GaConfig, OptimizationTrace, greedy_seed, optimize, optimize_without_ia
from .oracle import brute_force_optimum
from .routing import LflReport, RoutingTable, build_routing, lfl
from .sweep import SweepSpec, improvement_pct, run_sweep

__all__ = [
    "Deployment", "DelayReport", "FlatNetworkModel", "GaConfig", "GeneratorParams",
    "LflReport", "Link", "MicroserviceType", "NetworkTopology", "Node", "NodeKind",
    "OptimizationTrace", "PRESETS", "RoutingTable", "Scenario", "ServiceSpec",
    "SweepSpec", "brute_force_optimum", "build_routing", "compile_service",
    "evaluate", "ga_blind", "generate_scenario", "greedy_baseline", "greedy_seed",
    "improvement_pct", "instance_probabilities", "lfl", "optimize",
    "optimize_without_ia", "pairwise_flows", "random_deploy", "residual_bandwidth",
    "run_sweep", "traffic", "validate_deployment",
]
