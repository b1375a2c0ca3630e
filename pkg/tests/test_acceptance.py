"""End-to-end runs of the bundled scenarios."""

from pathlib import Path

import numpy as np
import pytest

from Control.controller import control_bound
from Geometry.stereographic import project
from Selfcheck.suites import run_suites
from Simulation.basin import run_basin
from Simulation.scenario import load_scenario
from Simulation.simulator import REPORT_TOL, Simulator, dual_consistency_check, simulate

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


@pytest.fixture(scope="module")
def five_cone_run():
    scenario = load_scenario(str(SCENARIOS / "pendulum_five_cones.json"))
    return scenario, simulate(scenario)


def test_five_cone_reference_run(five_cone_run):
    _, traj = five_cone_run
    s = traj.summary
    assert s.converged and s.successful
    assert s.t_converge < 20.0
    assert s.final_distance < 1e-3
    assert s.min_margin_overall >= -REPORT_TOL
    assert np.all(traj.margins() >= -REPORT_TOL)


def test_five_cone_potential_never_increases(five_cone_run):
    _, traj = five_cone_run
    phis = traj.phis()
    assert phis[0] > phis[-1]
    assert np.all(np.diff(phis) <= 1e-9)


def test_five_cone_controls_stay_below_sampled_cap(five_cone_run):
    scenario, traj = five_cone_run
    sim = Simulator(scenario)
    cap = control_bound(sim.controller, extra_states=[sim.problem.x0.coords])
    assert np.isfinite(cap)
    assert traj.summary.max_control_norm <= cap


def test_single_cone_reference_run(scenario_path):
    scenario = load_scenario(scenario_path("single_cone.json"))
    traj = simulate(scenario)
    assert traj.summary.converged
    xid = project(scenario.xd).coords
    d0 = np.linalg.norm(project(scenario.x0).coords - xid)
    # ln|xi - xi_d| falls with slope -gamma
    for sample in traj.samples[10:200]:
        slope = np.log(np.linalg.norm(sample.xi - xid) / d0) / sample.t
        assert slope == pytest.approx(-scenario.params.gamma, abs=1e-3)


@pytest.mark.slow
def test_five_cone_dual_consistency(five_cone_run):
    scenario, _ = five_cone_run
    assert dual_consistency_check(scenario) <= 1e-6


@pytest.mark.slow
def test_five_cone_basin(five_cone_run):
    scenario, _ = five_cone_run
    report = run_basin(scenario, 500, jobs=4)
    assert report.count == 500
    assert report.converged_fraction >= 0.99
    assert report.violation_fraction == 0.0


@pytest.mark.slow
def test_full_size_selfcheck():
    results = run_suites()
    assert [r.name for r in results if not r.passed] == []
