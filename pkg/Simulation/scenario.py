"""
Scenario documents: one JSON file describes the sphere dimension, the dynamics
model, the cones, start and target, controller and integration settings, and
where to write the trajectory.

    {
      "dimension": 2,
      "dynamics": {"type": "spherical_pendulum"},
      "constraints": [{"axis": [0, 0, 1], "angle_rad": 0.4488}, ...],
      "start": [...], "target": [...],
      "controller": {"mode": "multi", "gamma": 5, "k": 5},
      "integration": {"dt": 0.001, "t_end": 20, "convergence_tol": 0.001, "record_stride": 10},
      "output": {"path": "trajectory.csv", "format": "csv"}
    }
"""

import json
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional

import numpy as np

from Control.dynamics import DynamicsModel, make_dynamics
from Geometry.sphere import UnitVector
from Navigation.navigation_function import NavParams
from World.sphere_world import ConicConstraint, ConstraintSet
from utils.exceptions import ConicNavError, ScenarioLoadError

logger = logging.getLogger(__name__)

AXIS_NORM_WARN = 1e-6
OUTPUT_FORMATS = ("csv", "json")


@dataclass(frozen=True, eq=False)
class Scenario:
    dimension: int
    dynamics: str
    constraints: ConstraintSet
    x0: UnitVector
    xd: UnitVector
    params: NavParams = field(default_factory=NavParams)
    mode: str = "multi"
    dt: float = 1e-3
    t_end: float = 20.0
    convergence_tol: float = 1e-3
    record_stride: int = 1
    output_path: Optional[str] = None
    output_format: str = "csv"

    def __post_init__(self):
        bad = []
        if not self.dt > 0:
            bad.append("integration.dt")
        if not self.t_end >= self.dt:
            bad.append("integration.t_end")
        if not self.convergence_tol > 0:
            bad.append("integration.convergence_tol")
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            bad.append("integration.record_stride")
        if self.mode not in ("single", "multi"):
            bad.append("controller.mode")
        if self.output_format not in OUTPUT_FORMATS:
            bad.append("output.format")
        if self.constraints.n != self.dimension:
            bad.append("constraints")
        if self.x0.n != self.dimension:
            bad.append("start")
        if self.xd.n != self.dimension:
            bad.append("target")
        if bad:
            raise ScenarioLoadError(f"invalid scenario fields: {bad}", invalid_fields=bad)

    def make_model(self) -> DynamicsModel:
        return make_dynamics(self.dynamics, self.dimension)

    def with_start(self, x0) -> "Scenario":
        return replace(self, x0=UnitVector(x0, strict=False))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dimension": self.dimension,
            "dynamics": {"type": self.dynamics},
            "constraints": [
                {"axis": c.axis.coords.tolist(), "angle_rad": c.half_angle}
                for c in self.constraints.constraints
            ],
            "start": self.x0.coords.tolist(),
            "target": self.xd.coords.tolist(),
            "controller": {"mode": self.mode, "gamma": self.params.gamma, "k": self.params.k},
            "integration": {
                "dt": self.dt,
                "t_end": self.t_end,
                "convergence_tol": self.convergence_tol,
                "record_stride": self.record_stride,
            },
            "output": {"path": self.output_path, "format": self.output_format},
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "Scenario":
        """
        Build a Scenario from a parsed document.

        Raises:
            ScenarioLoadError: missing or malformed fields (collected together)
        """
        if not isinstance(data, dict):
            raise ScenarioLoadError("scenario document must be a JSON object")
        missing = [k for k in ("dimension", "dynamics", "constraints", "start", "target") if k not in data]
        if missing:
            raise ScenarioLoadError(f"missing required fields: {missing}", invalid_fields=missing)

        try:
            dimension = int(data["dimension"])
            dynamics = str(data["dynamics"]["type"])
            constraints = ConstraintSet(
                tuple(
                    ConicConstraint(_load_unit(c["axis"], f"constraints[{i}].axis"), float(c["angle_rad"]))
                    for i, c in enumerate(data["constraints"])
                )
            )
            x0 = _load_unit(data["start"], "start")
            xd = _load_unit(data["target"], "target")
            ctrl = data.get("controller", {})
            integ = data.get("integration", {})
            out = data.get("output", {})
            return Scenario(
                dimension=dimension,
                dynamics=dynamics,
                constraints=constraints,
                x0=x0,
                xd=xd,
                params=NavParams(float(ctrl.get("gamma", 5.0)), float(ctrl.get("k", 5.0))),
                mode=str(ctrl.get("mode", "multi")),
                dt=float(integ.get("dt", 1e-3)),
                t_end=float(integ.get("t_end", 20.0)),
                convergence_tol=float(integ.get("convergence_tol", 1e-3)),
                record_stride=int(integ.get("record_stride", 1)),
                output_path=out.get("path"),
                output_format=str(out.get("format", "csv")),
            )
        except ScenarioLoadError:
            raise
        except (ConicNavError, KeyError, TypeError, ValueError) as e:
            raise ScenarioLoadError(f"failed to parse scenario: {e}") from e


def _load_unit(raw: List[float], name: str) -> UnitVector:
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 1:
        raise ScenarioLoadError(f"{name} must be a flat list of numbers", invalid_fields=[name])
    norm = np.linalg.norm(arr)
    if abs(norm - 1.0) > AXIS_NORM_WARN:
        logger.warning("%s has norm %.6g; normalizing", name, norm)
    return UnitVector(arr, strict=False)


def load_scenario(path: str) -> Scenario:
    try:
        with open(path) as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ScenarioLoadError(f"scenario file not found: {path}")
    except json.JSONDecodeError as e:
        raise ScenarioLoadError(f"invalid JSON in scenario file: {e}")
    return Scenario.from_dict(data)


def save_scenario(scenario: Scenario, path: str) -> None:
    with open(path, "w") as f:
        json.dump(scenario.to_dict(), f, indent=2)
