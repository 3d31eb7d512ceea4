import json

import pytest

from edgeplan.cli import main
from edgeplan.scenario_io import load_scenario, save_ga_config
from edgeplan.optimizer import GaConfig

FAST_CFG = GaConfig(
    population_size=12,
    tournament_group_size=3,
    max_iterations=25,
    stagnation_limit=8,
    super_individual_count=2,
    rng_seed=0,
)


@pytest.fixture
def scenario_file(tmp_path):
    out = tmp_path / "scenario.json"
    assert main(["gen", "--preset", "desk", "--seed", "0", "--out", str(out)]) == 0
    return out


def test_gen_writes_loadable_scenario(scenario_file):
    s = load_scenario(scenario_file)
    assert len(s.services) == 3


def test_gen_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["gen", "--preset", "oracle", "--seed", "4", "--out", str(a)])
    main(["gen", "--preset", "oracle", "--seed", "4", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_optimize_and_evaluate(tmp_path, scenario_file, capsys):
    cfg = tmp_path / "ga.json"
    save_ga_config(FAST_CFG, cfg)
    dep = tmp_path / "dep.json"
    trace = tmp_path / "trace.csv"
    rc = main([
        "optimize", "--scenario", str(scenario_file), "--ga-config", str(cfg),
        "--out-deployment", str(dep), "--out-trace", str(trace),
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "best_T_seconds," in out
    assert trace.read_text().startswith("iteration,best_T")

    rc = main(["evaluate", "--scenario", str(scenario_file), "--deployment", str(dep)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "total_T_seconds," in out


def test_baseline_schemes(tmp_path, scenario_file, capsys):
    for scheme in ("random", "greedy"):
        dep = tmp_path / f"{scheme}.json"
        rc = main([
            "baseline", "--scheme", scheme, "--scenario", str(scenario_file),
            "--out-deployment", str(dep),
        ])
        assert rc == 0
        assert dep.exists()
    capsys.readouterr()


def test_lfl_output(scenario_file, capsys):
    assert main(["lfl", "--scenario", str(scenario_file)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("src,dst,load")
    assert "average," in out


def test_sweep_command(tmp_path, scenario_file):
    cfg = tmp_path / "ga.json"
    save_ga_config(FAST_CFG, cfg)
    out = tmp_path / "sweep.csv"
    rc = main([
        "sweep", "--axis", "bandwidth", "--values", "1.0", "--schemes",
        "random,greedy", "--seeds", "0", "--preset", "desk",
        "--ga-config", str(cfg), "--stable-timing", "--out", str(out),
    ])
    assert rc == 0
    assert out.exists()
    assert (tmp_path / "sweep.csv.summary.csv").exists()


def test_oracle_command(tmp_path, capsys):
    scen = tmp_path / "tiny.json"
    main(["gen", "--preset", "oracle", "--seed", "0", "--out", str(scen)])
    capsys.readouterr()
    assert main(["oracle", "--scenario", str(scen)]) == 0
    assert "optimal_T_seconds," in capsys.readouterr().out


def test_bad_arguments_exit_1(capsys):
    assert main(["gen", "--preset", "desk"]) == 1  # missing --out
    assert "error" in capsys.readouterr().err


def test_domain_error_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"format_version": 1}))
    assert main(["evaluate", "--scenario", str(bad), "--deployment", str(bad)]) == 2


def test_missing_file_exit_2(tmp_path):
    missing = str(tmp_path / "none.json")
    assert main(["lfl", "--scenario", missing]) == 2
