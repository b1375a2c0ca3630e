import numpy as np
import pytest

from Geometry.sphere import UnitVector
from Selfcheck.suites import (
    chart_identities,
    distance_bounds,
    navigation_gradient,
    pendulum_closed_forms,
    pendulum_five_cones,
    random_constraint_set,
    run_suites,
)
from World.sphere_world import validate


@pytest.fixture(scope="module")
def small_run():
    return run_suites([1, 2], seed=0, samples=500)


def test_small_run_passes(small_run):
    failed = [r.name for r in small_run if not r.passed]
    assert failed == []
    assert all(r.checked > 0 for r in small_run)


def test_suites_cover_every_group(small_run):
    names = " ".join(r.name for r in small_run)
    for group in ("chart identities", "sphere world mapping", "navigation gradient", "distance sandwich", "pendulum"):
        assert group in names
    assert "five cones" in names


def test_run_is_deterministic(small_run):
    again = run_suites([1, 2], seed=0, samples=500)
    assert [r.worst for r in again] == [r.worst for r in small_run]


def test_perturbation_is_detected():
    rng = np.random.default_rng(0)
    assert not chart_identities(2, 50, rng, perturbation=1e-3).passed
    assert not navigation_gradient(pendulum_five_cones(), 10, rng, "five cones", perturbation=1e-3).passed


def test_random_sets_satisfy_separation():
    rng = np.random.default_rng(7)
    for n in (1, 2, 3, 5):
        cset = random_constraint_set(rng, n)
        pole = UnitVector.pole(n)
        assert validate(cset, pole, pole).separation.passed


def test_individual_suites_pass(rng):
    assert pendulum_closed_forms(100, rng).passed
    assert distance_bounds(pendulum_five_cones(), 300, rng, "five cones").passed


def test_navigation_gradient_tolerance(rng):
    result = navigation_gradient(pendulum_five_cones(), 10, rng, "five cones")
    assert result.passed
    assert {tol for _, tol in result.worst.values()} == {1e-6}
