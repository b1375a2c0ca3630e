import threading
from queue import Queue
from threading import Event

import numpy as np
import pytest

from Simulation import basin
from Simulation.basin import SimulationHandler, basin_starts, run_basin
from Simulation.simulator import simulate
from World.sphere_world import prepare, sphere_margin
from utils.thread_manager import ThreadManager
from utils.utils import circle_points, generalized_golden_ratio, golden_spiral, kronecker_sphere, sphere_points


class TestPointSets:
    @pytest.mark.parametrize("dim", [2, 3, 4, 6])
    def test_unit_and_deterministic(self, dim):
        pts = sphere_points(64, dim)
        assert pts.shape == (64, dim)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-14)
        np.testing.assert_array_equal(pts, sphere_points(64, dim))

    def test_circle(self):
        pts = circle_points(4)
        np.testing.assert_allclose(pts[0], [np.cos(np.pi / 4), np.sin(np.pi / 4)])

    def test_golden_spiral_is_balanced(self):
        pts = golden_spiral(2000)
        assert np.linalg.norm(pts.mean(axis=0)) < 1e-2

    def test_kronecker_is_balanced(self):
        assert np.linalg.norm(kronecker_sphere(4000, 5).mean(axis=0)) < 5e-2

    def test_generalized_golden_ratio(self):
        assert generalized_golden_ratio(1) == pytest.approx((1 + np.sqrt(5)) / 2)
        g = generalized_golden_ratio(3)
        assert g**4 == pytest.approx(g + 1)


class TestBasinStarts:
    def test_single_start_is_scenario_start(self, five_cones, x0, xd):
        starts = basin_starts(prepare(five_cones, x0, xd), 1)
        np.testing.assert_allclose(starts, [x0.coords])

    def test_starts_lie_in_free_space(self, five_cones, x0, xd):
        starts = basin_starts(prepare(five_cones, x0, xd), 200)
        assert starts.shape == (200, 3)
        assert all(sphere_margin(five_cones, s).minimum > 0 for s in starts)
        np.testing.assert_array_equal(starts, basin_starts(prepare(five_cones, x0, xd), 200))

    def test_rejects_zero(self, five_cones, x0, xd):
        with pytest.raises(ValueError):
            basin_starts(prepare(five_cones, x0, xd), 0)


def test_single_cone_basin_converges(make_scenario, single_cone):
    report = run_basin(make_scenario(single_cone, "single"), 8, jobs=3, dt=1e-2)
    assert report.count == 8
    assert [o.index for o in report.outcomes] == list(range(8))
    assert report.converged_fraction == 1.0
    assert report.violation_fraction == 0.0
    assert report.non_converged() == []


def test_single_start_matches_simulate(make_scenario, single_cone):
    scenario = make_scenario(single_cone, "single")
    report = run_basin(scenario, 1)
    summary = simulate(scenario).summary
    assert report.outcomes[0].converged == summary.converged
    # the start goes through the user frame and back, so allow rounding
    assert report.outcomes[0].final_distance == pytest.approx(summary.final_distance, abs=1e-9)
    assert report.outcomes[0].t_converge == pytest.approx(summary.t_converge, abs=2e-3)


def test_worker_records_failures(make_scenario, single_cone):
    stop, work_q, result_q = Event(), Queue(), Queue()
    handler = SimulationHandler(stop, work_q, result_q, setup_kwargs={"scenario": make_scenario(single_cone, "single")})
    work_q.put((0, np.array([0.0, 0.0, 1.0])))  # inside the bounding cone
    work_q.put(None)
    manager = ThreadManager([handler])
    manager.start()
    manager.join()
    outcome = result_q.get()
    assert outcome.index == 0
    assert not outcome.converged
    assert "ScenarioValidationError" in outcome.error
    assert result_q.get() is None
    assert handler.processed == 1


def test_stopped_worker_skips_queue(make_scenario, single_cone):
    stop, work_q, result_q = Event(), Queue(), Queue()
    handler = SimulationHandler(stop, work_q, result_q, setup_kwargs={"scenario": make_scenario(single_cone, "single")})
    work_q.put((0, np.array([1.0, 0.0, 0.0])))
    manager = ThreadManager([handler])
    manager.stop()
    manager.start()
    manager.join()
    assert stop.is_set()
    assert handler.processed == 0
    assert result_q.get() is None
    assert work_q.qsize() == 1


class _FailingResultQueue(Queue):
    """Raises when the collecting (main) thread reads from it."""

    def get(self, *args, **kwargs):
        if threading.current_thread() is threading.main_thread():
            raise RuntimeError("collector failed")
        return super().get(*args, **kwargs)


def test_collection_failure_stops_workers(make_scenario, single_cone, monkeypatch):
    stopped = []
    original_stop = ThreadManager.stop

    def spy_stop(self):
        stopped.append(self)
        original_stop(self)

    monkeypatch.setattr(basin, "Queue", _FailingResultQueue)
    monkeypatch.setattr(ThreadManager, "stop", spy_stop)
    with pytest.raises(RuntimeError, match="collector failed"):
        run_basin(make_scenario(single_cone, "single"), 4, jobs=2, dt=1e-2)
    assert len(stopped) == 1
    assert all(not t.is_alive() for t in stopped[0].threads)
    assert all(h.stop_event.is_set() for h in stopped[0].handlers)
