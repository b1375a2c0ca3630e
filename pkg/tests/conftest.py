from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from Geometry.sphere import UnitVector
from Navigation.navigation_function import NavParams
from Selfcheck.suites import pendulum_five_cones
from Simulation.scenario import Scenario
from World.sphere_world import constraint_set

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"

X0 = np.array([-1.0, 0.0, 1.0]) / np.sqrt(2.0)
XD = np.array([1.0, 2.0, -2.0]) / 3.0
THETA0 = np.pi / 7


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def five_cones():
    return pendulum_five_cones()


@pytest.fixture
def single_cone():
    return constraint_set([[0, 0, 1]], [THETA0])


@pytest.fixture
def x0():
    return UnitVector(X0, strict=False)


@pytest.fixture
def xd():
    return UnitVector(XD, strict=False)


@pytest.fixture
def make_scenario():
    """Scenario builder around the pendulum start/target; keyword overrides go through."""

    def build(cset, mode="multi", dynamics="spherical_pendulum", **overrides):
        base = Scenario(
            dimension=cset.n,
            dynamics=dynamics,
            constraints=cset,
            x0=UnitVector(X0, strict=False),
            xd=UnitVector(XD, strict=False),
            params=NavParams(5.0, 5.0),
            mode=mode,
            dt=1e-3,
            t_end=5.0,
            record_stride=10,
        )
        return replace(base, **overrides)

    return build


@pytest.fixture
def scenario_path():
    def path(name):
        return str(SCENARIOS / name)

    return path
