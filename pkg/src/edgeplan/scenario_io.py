"""Versioned JSON formats for scenarios, deployments, and GA configs.

Loaders reject unknown fields so that typos fail loudly instead of being
silently ignored.  Writers emit sorted keys, making identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import FormatError
from .model import (
    Deployment,
    Link,
    MicroserviceType,
    NetworkTopology,
    Node,
    NodeKind,
    Scenario,
    compile_service,
)
from .optimizer import GaConfig

FORMAT_VERSION = 1

_KIND_NAMES = {
    NodeKind.USER_ACCESS: "access",
    NodeKind.ROUTING: "routing",
    NodeKind.COMPUTE: "compute",
}
_KIND_BY_NAME = {v: k for k, v in _KIND_NAMES.items()}


def _require_fields(obj: Mapping[str, Any], allowed: set[str], required: set[str], ctx: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise FormatError(f"{ctx}: unknown fields {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise FormatError(f"{ctx}: missing fields {sorted(missing)}")


def _check_version(obj: Mapping[str, Any], ctx: str) -> None:
    if obj.get("format_version") != FORMAT_VERSION:
        raise FormatError(
            f"{ctx}: format_version must be {FORMAT_VERSION}, got {obj.get('format_version')!r}"
        )


def scenario_to_dict(scenario: Scenario) -> dict:
    nodes = []
    for n in scenario.topology.nodes:
        entry: dict[str, Any] = {"id": n.id, "kind": _KIND_NAMES[n.kind]}
        if n.kind is NodeKind.COMPUTE:
            entry["cpu"] = n.cpu_capacity
            entry["mem"] = n.mem_capacity
        if n.kind is NodeKind.USER_ACCESS:
            entry["arrival_rates"] = list(n.arrival_rates)
        nodes.append(entry)
    links = [
        {"a": ln.a, "b": ln.b, "bandwidth_mbps": ln.bandwidth,
         "propagation_s": ln.propagation_delay}
        for ln in scenario.topology.links
    ]
    catalog = [
        {"id": t.id, "cpu": t.cpu_demand, "mem": t.mem_demand, "instances": t.instance_count}
        for t in scenario.catalog
    ]
    services = []
    for svc in scenario.services:
        payloads = []
        for i, j in zip(*np.nonzero(svc.request_matrix)):
            payloads.append({
                "caller": int(i), "callee": int(j),
                "request_kb": float(svc.payload_req[i, j]),
                "response_kb": float(svc.payload_res[j, i]),
            })
        services.append({
            "id": svc.id,
            "weight": svc.weight,
            "sequence": [[frm, to, kind] for frm, to, kind in svc.invocation_sequence],
            "payloads": payloads,
        })
    return {
        "format_version": FORMAT_VERSION,
        "packet_size_kb": scenario.packet_size,
        "rng_seed": scenario.rng_seed,
        "nodes": nodes,
        "links": links,
        "microservices": catalog,
        "services": services,
    }


def scenario_from_dict(data: Mapping[str, Any]) -> Scenario:
    _check_version(data, "scenario")
    _require_fields(
        data,
        {"format_version", "packet_size_kb", "rng_seed", "nodes", "links",
         "microservices", "services"},
        {"format_version", "nodes", "links", "microservices", "services"},
        "scenario",
    )
    nodes = []
    for raw in data["nodes"]:
        _require_fields(raw, {"id", "kind", "cpu", "mem", "arrival_rates"},
                        {"id", "kind"}, f"node {raw.get('id')}")
        kind = _KIND_BY_NAME.get(raw["kind"])
        if kind is None:
            raise FormatError(f"node {raw['id']}: unknown kind {raw['kind']!r}")
        nodes.append(Node(
            id=int(raw["id"]),
            kind=kind,
            cpu_capacity=float(raw.get("cpu", 0.0)),
            mem_capacity=float(raw.get("mem", 0.0)),
            arrival_rates=tuple(float(r) for r in raw.get("arrival_rates", ())),
        ))
    links = []
    for raw in data["links"]:
        _require_fields(raw, {"a", "b", "bandwidth_mbps", "propagation_s"},
                        {"a", "b", "bandwidth_mbps", "propagation_s"}, "link")
        links.append(Link(
            a=int(raw["a"]), b=int(raw["b"]),
            bandwidth=float(raw["bandwidth_mbps"]),
            propagation_delay=float(raw["propagation_s"]),
        ))
    catalog = []
    for raw in data["microservices"]:
        _require_fields(raw, {"id", "cpu", "mem", "instances"},
                        {"id", "instances"}, f"microservice {raw.get('id')}")
        catalog.append(MicroserviceType(
            id=int(raw["id"]),
            cpu_demand=float(raw.get("cpu", 0.0)),
            mem_demand=float(raw.get("mem", 0.0)),
            instance_count=int(raw["instances"]),
        ))
    services = []
    for raw in data["services"]:
        _require_fields(raw, {"id", "weight", "sequence", "payloads"},
                        {"id", "sequence", "payloads"}, f"service {raw.get('id')}")
        payload_table = {}
        for p in raw["payloads"]:
            _require_fields(p, {"caller", "callee", "request_kb", "response_kb"},
                            {"caller", "callee", "request_kb", "response_kb"},
                            f"service {raw['id']} payload")
            payload_table[(int(p["caller"]), int(p["callee"]))] = (
                float(p["request_kb"]), float(p["response_kb"]),
            )
        sequence = [(int(e[0]), int(e[1]), str(e[2])) for e in raw["sequence"]]
        weight = float(raw.get("weight", 1.0 / max(1, len(data["services"]))))
        services.append(compile_service(
            service_id=int(raw["id"]),
            weight=weight,
            sequence=sequence,
            payload_table=payload_table,
            type_count=len(catalog),
        ))
    return Scenario(
        topology=NetworkTopology(nodes, links),
        catalog=tuple(catalog),
        services=tuple(services),
        packet_size=float(data.get("packet_size_kb", 1.0)),
        rng_seed=int(data.get("rng_seed", 0)),
    )


def _dump(data: dict, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _load(path: str | Path, ctx: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise FormatError(f"{ctx} {path}: cannot read ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{ctx} {path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{ctx} {path}: top level must be an object")
    return data


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    _dump(scenario_to_dict(scenario), path)


def load_scenario(path: str | Path) -> Scenario:
    return scenario_from_dict(_load(path, "scenario"))


def save_deployment(deployment: Deployment, path: str | Path) -> None:
    placement = {
        str(i): list(deployment.instance_nodes(i))
        for i in range(deployment.placement.shape[1])
    }
    _dump({"format_version": FORMAT_VERSION, "placement": placement}, path)


def load_deployment(path: str | Path, scenario: Scenario) -> Deployment:
    data = _load(path, "deployment")
    _check_version(data, "deployment")
    _require_fields(data, {"format_version", "placement"},
                    {"format_version", "placement"}, "deployment")
    try:
        nodes_per_type = {
            int(i): [int(p) for p in nodes] for i, nodes in data["placement"].items()
        }
    except (TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"malformed deployment placement: {exc}") from exc
    return Deployment.from_instance_nodes(
        len(scenario.topology), scenario.type_count, nodes_per_type
    )


_GA_FIELDS = {
    "population_size", "tournament_group_size", "crossover_prob", "mutation_prob",
    "max_iterations", "stagnation_limit", "super_individual_count", "rng_seed",
}


def save_ga_config(config: GaConfig, path: str | Path) -> None:
    data = {"format_version": FORMAT_VERSION}
    data.update({f: getattr(config, f) for f in sorted(_GA_FIELDS)})
    _dump(data, path)


def load_ga_config(path: str | Path) -> GaConfig:
    data = _load(path, "ga config")
    _check_version(data, "ga config")
    _require_fields(data, _GA_FIELDS | {"format_version"}, {"format_version"}, "ga config")
    kwargs = {f: data[f] for f in _GA_FIELDS if f in data}
    return GaConfig(**kwargs)
