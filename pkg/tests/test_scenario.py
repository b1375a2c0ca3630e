import json
import logging

import numpy as np
import pytest

from Simulation.scenario import Scenario, load_scenario, save_scenario
from utils.exceptions import ScenarioLoadError


def _doc(scenario_path, name="pendulum_five_cones.json"):
    with open(scenario_path(name)) as f:
        return json.load(f)


def test_reference_scenarios_load(scenario_path):
    five = load_scenario(scenario_path("pendulum_five_cones.json"))
    assert five.dimension == 2
    assert len(five.constraints) == 5
    np.testing.assert_allclose(five.constraints.half_angles, [np.pi / (7 + i) for i in range(5)])
    np.testing.assert_allclose(five.x0.coords, np.array([-1, 0, 1]) / np.sqrt(2))
    np.testing.assert_allclose(five.xd.coords, np.array([1, 2, -2]) / 3)
    assert (five.params.gamma, five.params.k) == (5.0, 5.0)
    assert five.mode == "multi"

    single = load_scenario(scenario_path("single_cone.json"))
    assert single.mode == "single"
    assert len(single.constraints) == 1


def test_missing_fields_are_collected(scenario_path):
    doc = _doc(scenario_path)
    del doc["start"], doc["target"]
    with pytest.raises(ScenarioLoadError) as info:
        Scenario.from_dict(doc)
    assert info.value.invalid_fields == ["start", "target"]


@pytest.mark.parametrize(
    "section, key, value, field_name",
    [
        ("integration", "dt", 0.0, "integration.dt"),
        ("integration", "t_end", 1e-5, "integration.t_end"),
        ("integration", "record_stride", 0, "integration.record_stride"),
        ("controller", "mode", "both", "controller.mode"),
        ("output", "format", "xml", "output.format"),
    ],
)
def test_invalid_values(scenario_path, section, key, value, field_name):
    doc = _doc(scenario_path)
    doc[section][key] = value
    with pytest.raises(ScenarioLoadError) as info:
        Scenario.from_dict(doc)
    assert field_name in info.value.invalid_fields


def test_dimension_mismatch(scenario_path):
    doc = _doc(scenario_path)
    doc["start"] = [1.0, 0.0, 0.0, 0.0]
    with pytest.raises(ScenarioLoadError) as info:
        Scenario.from_dict(doc)
    assert "start" in info.value.invalid_fields


def test_bad_angle_is_a_load_error(scenario_path):
    doc = _doc(scenario_path)
    doc["constraints"][1]["angle_rad"] = 2.0
    with pytest.raises(ScenarioLoadError):
        Scenario.from_dict(doc)


def test_axes_are_normalized_with_warning(scenario_path, caplog):
    doc = _doc(scenario_path)
    doc["constraints"][1]["axis"] = [2.0, 0.0, 0.0]
    with caplog.at_level(logging.WARNING):
        scenario = Scenario.from_dict(doc)
    np.testing.assert_allclose(scenario.constraints.constraints[1].axis.coords, [1.0, 0.0, 0.0])
    assert "normalizing" in caplog.text


def test_file_errors(tmp_path):
    with pytest.raises(ScenarioLoadError):
        load_scenario(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{ not json")
    with pytest.raises(ScenarioLoadError):
        load_scenario(str(broken))
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]")
    with pytest.raises(ScenarioLoadError):
        load_scenario(str(listed))


def test_save_and_reload(scenario_path, tmp_path):
    scenario = load_scenario(scenario_path("pendulum_five_cones.json"))
    path = tmp_path / "copy.json"
    save_scenario(scenario, str(path))
    again = load_scenario(str(path))
    assert again.to_dict() == scenario.to_dict()


def test_with_start(scenario_path):
    scenario = load_scenario(scenario_path("single_cone.json"))
    moved = scenario.with_start([0.0, 2.0, 0.0])
    np.testing.assert_allclose(moved.x0.coords, [0.0, 1.0, 0.0])
    assert moved.xd is scenario.xd
