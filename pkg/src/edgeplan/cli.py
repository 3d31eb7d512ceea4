"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 domain error.  All randomness is
controlled through ``--seed`` flags; repeated runs with the same seed write
byte-identical files (``sweep`` additionally needs ``--stable-timing``,
since wall-clock timings are inherently non-reproducible).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .baselines import FlatNetworkModel, ga_blind, greedy_baseline, random_deploy
from .delay import evaluate
from .errors import EdgeplanError
from .generate import PRESETS, GeneratorParams, generate_scenario
from .model import Scenario
from .optimizer import GaConfig, optimize, optimize_without_ia
from .oracle import DEFAULT_SIZE_GUARD, brute_force_optimum
from .routing import build_routing, lfl
from .scenario_io import (
    load_deployment,
    load_ga_config,
    load_scenario,
    save_deployment,
    save_scenario,
)
from .sweep import AXES, SCHEMES, SweepSpec, run_sweep, write_sweep_csv, write_sweep_summary


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="edgeplan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random scenario file")
    p.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target-lfl", type=float, default=None,
                   help="aim the topology at this average link forwarding load")
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="score a deployment on a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--deployment", required=True)

    p = sub.add_parser("optimize", help="run the topology-aware genetic search")
    p.add_argument("--scenario", required=True)
    p.add_argument("--ga-config", default=None)
    p.add_argument("--seed", type=int, default=None,
                   help="override the config's rng seed")
    p.add_argument("--no-ia", action="store_true",
                   help="disable the greedy-seeded super individuals")
    p.add_argument("--out-deployment", required=True)
    p.add_argument("--out-trace", default=None, help="per-iteration best-T CSV")

    p = sub.add_parser("baseline", help="run a comparison scheme")
    p.add_argument("--scheme", choices=["random", "greedy", "ga-blind"], required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--ga-config", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-deployment", required=True)

    p = sub.add_parser("lfl", help="print link forwarding loads as CSV")
    p.add_argument("--scenario", required=True)

    p = sub.add_parser("sweep", help="run an experiment sweep")
    p.add_argument("--axis", choices=AXES, required=True)
    p.add_argument("--values", required=True, help="comma-separated axis values")
    p.add_argument("--schemes", default=",".join(SCHEMES))
    p.add_argument("--seeds", default="0", help="comma-separated seeds")
    p.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    p.add_argument("--ga-config", default=None)
    p.add_argument("--stable-timing", action="store_true",
                   help="write wall_ms as 0 for reproducible output")
    p.add_argument("--out", required=True)

    p = sub.add_parser("oracle", help="exhaustive optimum for small scenarios")
    p.add_argument("--scenario", required=True)
    p.add_argument("--size-guard", type=int, default=DEFAULT_SIZE_GUARD)
    p.add_argument("--out-deployment", default=None)

    return parser


def _print_report(scenario: Scenario, deployment, routing) -> None:
    report = evaluate(scenario, deployment, routing)
    print("service,T_k_seconds")
    for k, tk in enumerate(report.per_service):
        print(f"{k},{tk!r}")
    print("src,dst,traffic_mbps,residual_mbps")
    for (x, y) in sorted(report.traffic.link_total):
        print(f"{x},{y},{report.traffic.link_total[(x, y)]!r},"
              f"{report.residual.residual[(x, y)]!r}")
    print(f"total_T_seconds,{report.total!r}")
    print(f"congested,{int(report.congested)}")


def _ga_config(args) -> GaConfig:
    config = load_ga_config(args.ga_config) if args.ga_config else GaConfig()
    seed = getattr(args, "seed", None)
    if seed is not None:
        config = replace(config, rng_seed=seed)
    return config


def _cmd_gen(args) -> int:
    params = PRESETS[args.preset]
    params = replace(params, rng_seed=args.seed, target_avg_lfl=args.target_lfl)
    save_scenario(generate_scenario(params), args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    scenario = load_scenario(args.scenario)
    deployment = load_deployment(args.deployment, scenario)
    _print_report(scenario, deployment, build_routing(scenario.topology))
    return 0


def _cmd_optimize(args) -> int:
    scenario = load_scenario(args.scenario)
    routing = build_routing(scenario.topology)
    config = _ga_config(args)
    run = optimize_without_ia if args.no_ia else optimize
    trace = run(scenario, routing, config)
    save_deployment(trace.best_deployment, args.out_deployment)
    if args.out_trace:
        with open(args.out_trace, "w", encoding="utf-8") as fh:
            fh.write("iteration,best_T\n")
            for i, t in enumerate(trace.best_t_per_iteration):
                fh.write(f"{i},{t!r}\n")
    print(f"best_T_seconds,{trace.best_t!r}")
    print(f"iterations,{trace.iterations}")
    print(f"termination,{trace.termination}")
    return 0


def _cmd_baseline(args) -> int:
    scenario = load_scenario(args.scenario)
    routing = build_routing(scenario.topology)
    if args.scheme == "random":
        deployment = random_deploy(scenario, args.seed)
    elif args.scheme == "greedy":
        deployment = greedy_baseline(scenario, routing)
    else:
        flat = FlatNetworkModel(
            propagation_delay=scenario.topology.links[0].propagation_delay,
            bandwidth=scenario.topology.links[0].bandwidth,
        )
        trace = ga_blind(scenario, flat, _ga_config(args))
        deployment = trace.best_deployment
    save_deployment(deployment, args.out_deployment)
    _print_report(scenario, deployment, routing)
    return 0


def _cmd_lfl(args) -> int:
    scenario = load_scenario(args.scenario)
    report = lfl(scenario.topology, build_routing(scenario.topology))
    print("src,dst,load")
    for (x, y), load in sorted(report.directed_load.items()):
        print(f"{x},{y},{load}")
    print(f"average,{report.average!r}")
    return 0


def _cmd_sweep(args) -> int:
    spec = SweepSpec(
        axis=args.axis,
        values=tuple(float(v) for v in args.values.split(",")),
        schemes=tuple(args.schemes.split(",")),
        seeds=tuple(int(s) for s in args.seeds.split(",")),
        ga_config=load_ga_config(args.ga_config) if args.ga_config else GaConfig(),
        stable_timing=args.stable_timing,
    )
    rows = run_sweep(spec, PRESETS[args.preset])
    write_sweep_csv(rows, args.out)
    write_sweep_summary(rows, str(args.out) + ".summary.csv")
    print(f"wrote {args.out} and {args.out}.summary.csv")
    return 0


def _cmd_oracle(args) -> int:
    scenario = load_scenario(args.scenario)
    routing = build_routing(scenario.topology)
    deployment, t = brute_force_optimum(scenario, routing, args.size_guard)
    if args.out_deployment:
        save_deployment(deployment, args.out_deployment)
    print(f"optimal_T_seconds,{t!r}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "evaluate": _cmd_evaluate,
    "optimize": _cmd_optimize,
    "baseline": _cmd_baseline,
    "lfl": _cmd_lfl,
    "sweep": _cmd_sweep,
    "oracle": _cmd_oracle,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except EdgeplanError as exc:
        print(f"edgeplan: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
