import json
from dataclasses import replace

import pytest

from edgeplan.baselines import random_deploy
from edgeplan.errors import FormatError
from edgeplan.generate import PRESETS, generate_scenario
from edgeplan.optimizer import GaConfig
from edgeplan.scenario_io import (
    load_deployment,
    load_ga_config,
    load_scenario,
    save_deployment,
    save_ga_config,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)


@pytest.fixture
def scenario():
    return generate_scenario(replace(PRESETS["desk"], rng_seed=0))


def test_scenario_roundtrip(tmp_path, scenario):
    path = tmp_path / "s.json"
    save_scenario(scenario, path)
    loaded = load_scenario(path)
    assert scenario_to_dict(loaded) == scenario_to_dict(scenario)


def test_scenario_save_is_deterministic(tmp_path, scenario):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_scenario(scenario, p1)
    save_scenario(scenario, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_unknown_field_rejected(scenario):
    data = scenario_to_dict(scenario)
    data["extra"] = 1
    with pytest.raises(FormatError):
        scenario_from_dict(data)


def test_unknown_nested_field_rejected(scenario):
    data = scenario_to_dict(scenario)
    data["nodes"][0]["surprise"] = True
    with pytest.raises(FormatError):
        scenario_from_dict(data)


def test_missing_field_rejected(scenario):
    data = scenario_to_dict(scenario)
    del data["services"]
    with pytest.raises(FormatError):
        scenario_from_dict(data)


def test_wrong_version_rejected(scenario):
    data = scenario_to_dict(scenario)
    data["format_version"] = 99
    with pytest.raises(FormatError):
        scenario_from_dict(data)


def test_deployment_roundtrip(tmp_path, scenario):
    d = random_deploy(scenario, seed=3)
    path = tmp_path / "d.json"
    save_deployment(d, path)
    assert load_deployment(path, scenario) == d


def test_deployment_bad_json(tmp_path, scenario):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"format_version": 1, "placement": {"X": [1]}}))
    with pytest.raises(FormatError):
        load_deployment(path, scenario)


def test_ga_config_roundtrip(tmp_path):
    cfg = GaConfig(population_size=24, tournament_group_size=4, rng_seed=9)
    path = tmp_path / "cfg.json"
    save_ga_config(cfg, path)
    assert load_ga_config(path) == cfg
