import json

import numpy as np
import pytest

from Simulation.simulator import simulate
from Simulation.trajectory_io import read_trajectory_csv, trajectory_columns, write_trajectory


@pytest.fixture
def single_traj(make_scenario, single_cone):
    return simulate(make_scenario(single_cone, "single", t_end=0.3))


@pytest.fixture
def multi_traj(make_scenario, five_cones):
    return simulate(make_scenario(five_cones, t_end=0.1))


def test_columns_single_mode(single_traj):
    assert trajectory_columns(single_traj) == [
        "t", "x_0", "x_1", "x_2", "xi_0", "xi_1", "u_0", "u_1", "u_2", "min_margin",
    ]


def test_columns_multi_mode(multi_traj):
    cols = trajectory_columns(multi_traj)
    assert cols[-2:] == ["phi", "min_margin"]


def test_csv_round_trip_is_exact(multi_traj, tmp_path):
    path = tmp_path / "traj.csv"
    write_trajectory(multi_traj, str(path), "csv")
    data = read_trajectory_csv(str(path))
    np.testing.assert_array_equal(data["t"], multi_traj.times())
    states = multi_traj.states()
    for i in range(3):
        np.testing.assert_array_equal(data[f"x_{i}"], states[:, i])
    np.testing.assert_array_equal(data["xi_1"], multi_traj.xis()[:, 1])
    np.testing.assert_array_equal(data["u_2"], multi_traj.controls()[:, 2])
    np.testing.assert_array_equal(data["phi"], multi_traj.phis())
    np.testing.assert_array_equal(data["min_margin"], multi_traj.margins())


def test_header_order_on_disk(single_traj, tmp_path):
    path = tmp_path / "traj.csv"
    write_trajectory(single_traj, str(path))
    header = path.read_text().splitlines()[0]
    assert header == "t,x_0,x_1,x_2,xi_0,xi_1,u_0,u_1,u_2,min_margin"


def test_json_output(single_traj, tmp_path):
    path = tmp_path / "traj.json"
    write_trajectory(single_traj, str(path), "json")
    doc = json.loads(path.read_text())
    assert doc["columns"] == trajectory_columns(single_traj)
    assert len(doc["rows"]) == len(single_traj.samples)
    assert doc["summary"]["steps"] == single_traj.summary.steps
    assert doc["rows"][-1][0] == single_traj.samples[-1].t


def test_unknown_format(single_traj, tmp_path):
    with pytest.raises(ValueError):
        write_trajectory(single_traj, str(tmp_path / "t.bin"), "bin")
