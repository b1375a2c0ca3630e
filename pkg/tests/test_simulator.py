import numpy as np
import pytest

from Geometry.sphere import UnitVector
from Geometry.stereographic import project, unproject
from Simulation.integrator import rk4_step
from Simulation.simulator import (
    SUSTAIN_STEPS,
    Simulator,
    dual_consistency_check,
    simulate,
    step,
)
from World.sphere_world import constraint_set
from utils.exceptions import ScenarioValidationError

GAMMA = 5.0


def _exact_xi(scenario, t):
    xi0, xid = project(scenario.x0).coords, project(scenario.xd).coords
    return xid + np.exp(-GAMMA * np.asarray(t))[..., None] * (xi0 - xid)


def test_rk4_step_is_exact_for_polynomials_of_degree_four():
    # y' = 4 t^3 written autonomously as (t, y)' = (1, 4 t^3)
    def f(state):
        return np.array([1.0, 4.0 * state[0] ** 3]), None

    y, _ = rk4_step(f, np.array([0.5, 0.0]), 0.25)
    assert y[1] == pytest.approx(0.75**4 - 0.5**4, rel=1e-14)


class TestStep:
    def test_target_is_a_fixed_point(self, make_scenario, single_cone, xd):
        nxt = step(xd, make_scenario(single_cone, "single"))
        np.testing.assert_allclose(nxt.coords, xd.coords, atol=1e-15)

    def test_single_mode_matches_exact_linear_flow(self, make_scenario, single_cone, x0):
        scenario = make_scenario(single_cone, "single")
        nxt = step(x0, scenario)
        err = np.linalg.norm(project(nxt).coords - _exact_xi(scenario, scenario.dt))
        assert err <= 1e-11

    def test_norm_drift_is_tiny(self, make_scenario, single_cone, x0):
        sim = Simulator(make_scenario(single_cone, "single"))
        x = sim.problem.x0.coords
        for i in range(50):
            x, _, _, drift = sim.step(x, i * 1e-3)
            assert drift <= 1e-12

    def test_unaligned_frame(self, make_scenario):
        cset = constraint_set([[1, 0, 0]], [np.pi / 7])
        scenario = make_scenario(cset, "single", x0=UnitVector([0.0, 0.0, 1.0]))
        nxt = step(scenario.x0, scenario)
        assert nxt.n == 2
        assert np.linalg.norm(nxt.coords - scenario.x0.coords) > 0


class TestSimulateSingleCone:
    @pytest.fixture
    def trajectory(self, make_scenario, single_cone):
        return simulate(make_scenario(single_cone, "single", t_end=5.0))

    def test_converges(self, trajectory):
        s = trajectory.summary
        assert s.converged and s.successful
        assert not s.safety_violation
        assert s.t_converge < 5.0
        assert s.final_distance < 1e-3

    def test_exponential_decay(self, trajectory, make_scenario, single_cone):
        scenario = make_scenario(single_cone, "single")
        xid = project(scenario.xd).coords
        d0 = np.linalg.norm(project(scenario.x0).coords - xid)
        for sample in trajectory.samples:
            ratio = np.linalg.norm(sample.xi - xid) / d0
            assert ratio == pytest.approx(np.exp(-GAMMA * sample.t), rel=1e-6)

    def test_samples(self, trajectory):
        times = trajectory.times()
        assert np.all(np.diff(times) > 0)
        assert times[0] == 0.0
        np.testing.assert_allclose(np.linalg.norm(trajectory.states(), axis=1), 1.0, atol=1e-9)
        assert trajectory.margins().min() >= -1e-9
        assert trajectory.summary.min_margin_overall >= -1e-9
        assert not trajectory.has_phi
        assert all(s.phi is None for s in trajectory.samples)
        # every 10th step plus the final sample
        steps = np.rint(times / 1e-3).astype(int)
        assert np.all(steps[:-1] % 10 == 0)

    def test_deterministic(self, trajectory, make_scenario, single_cone):
        again = simulate(make_scenario(single_cone, "single", t_end=5.0))
        np.testing.assert_array_equal(again.states(), trajectory.states())
        np.testing.assert_array_equal(again.controls(), trajectory.controls())

    def test_fourth_order(self, make_scenario, single_cone):
        errors = []
        for dt in (0.05, 0.025):
            traj = simulate(make_scenario(single_cone, "single", dt=dt, t_end=1.0, record_stride=1))
            last = traj.samples[-1]
            assert last.t == pytest.approx(1.0)
            errors.append(np.linalg.norm(last.xi - _exact_xi(make_scenario(single_cone, "single"), 1.0)))
        assert errors[0] / errors[1] >= 8.0


def test_start_at_target(make_scenario, single_cone, xd):
    traj = simulate(make_scenario(single_cone, "single", x0=xd, t_end=1.0))
    s = traj.summary
    assert s.converged
    assert s.t_converge == 0.0
    assert s.max_control_norm <= 1e-12
    assert s.steps == SUSTAIN_STEPS - 1


def test_invalid_scenario_is_refused(make_scenario, five_cones):
    with pytest.raises(ScenarioValidationError):
        simulate(make_scenario(five_cones, xd=UnitVector([1.0, 0.0, 0.0])))


def test_multi_mode_records_potential(make_scenario, five_cones):
    traj = simulate(make_scenario(five_cones, t_end=0.5))
    assert traj.has_phi
    phis = traj.phis()
    assert np.all((phis > 0) & (phis < 1))
    assert np.all(np.diff(phis) <= 1e-9)
    assert traj.summary.min_margin_overall >= -1e-9


def test_safety_violation_aborts_run(make_scenario, single_cone):
    sim = Simulator(make_scenario(single_cone, "single", t_end=2.0))
    # steer towards a point far outside the workspace ball
    sim.controller.xi_d = 10.0 * project(sim.problem.x0).coords
    traj = sim.simulate()
    s = traj.summary
    assert s.safety_violation
    assert not s.converged and not s.successful
    assert "safety violation" in s.abort_reason
    assert traj.samples[-1].t < 2.0


class TestDualConsistency:
    def test_single_cone(self, make_scenario, single_cone):
        assert dual_consistency_check(make_scenario(single_cone, "single"), horizon=2.0) <= 1e-8

    def test_zero_horizon(self, make_scenario, single_cone):
        assert dual_consistency_check(make_scenario(single_cone, "single"), horizon=0.0) == 0.0

    def test_multi_short_horizon(self, make_scenario, five_cones):
        assert dual_consistency_check(make_scenario(five_cones), horizon=0.5) <= 1e-6


def test_unproject_of_recorded_xi_matches_state(make_scenario, single_cone):
    traj = simulate(make_scenario(single_cone, "single", t_end=0.2))
    for s in traj.samples:
        np.testing.assert_allclose(unproject(s.xi).coords, s.x, atol=1e-12)
