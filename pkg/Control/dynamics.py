"""
Driftless kinematics x' = Pi(x) u on S^n with Im(Pi(x)) in T_x S^n.
"""

import logging
from abc import ABC, abstractmethod

import numpy as np

from Geometry.sphere import hat
from utils.exceptions import DimensionMismatchError, ScenarioLoadError

logger = logging.getLogger(__name__)


class DynamicsModel(ABC):
    """Provider of the input matrix Pi(x), (n+1) x m. Implementations must be stateless."""

    name = "abstract"

    def __init__(self, n: int, m: int):
        self.n = n
        self.m = m

    @abstractmethod
    def pi_matrix(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def velocity(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return self.pi_matrix(x) @ u


class SphericalPendulum(DynamicsModel):
    """x' = x cross u on S^2; u is the angular velocity."""

    name = "spherical_pendulum"

    def __init__(self, n: int = 2):
        if n != 2:
            raise DimensionMismatchError(f"the spherical pendulum lives on S^2, got n={n}")
        super().__init__(2, 3)

    def pi_matrix(self, x):
        return hat(x)

    def velocity(self, x, u):
        return np.cross(x, u)


class FullTangent(DynamicsModel):
    """Pi(x) = I - x x^T: the input is any ambient velocity, projected to T_x S^n."""

    name = "full_tangent"

    def __init__(self, n: int):
        if n < 1:
            raise DimensionMismatchError(f"n must be at least 1, got {n}")
        super().__init__(n, n + 1)

    def pi_matrix(self, x):
        x = np.asarray(x, dtype=float)
        return np.eye(x.size) - np.outer(x, x)


class AlignedDynamics(DynamicsModel):
    """
    A model expressed in the aligned frame y = R x: Pi_a(y) = R Pi(R^T y).
    The input u is the same in both frames.
    """

    def __init__(self, model: DynamicsModel, rotation: np.ndarray):
        super().__init__(model.n, model.m)
        self.model = model
        self.rotation = rotation
        self.name = model.name

    def pi_matrix(self, y):
        return self.rotation @ self.model.pi_matrix(self.rotation.T @ np.asarray(y, dtype=float))

    def velocity(self, y, u):
        return self.rotation @ self.model.velocity(self.rotation.T @ np.asarray(y, dtype=float), u)


DYNAMICS_MODELS = {
    SphericalPendulum.name: SphericalPendulum,
    FullTangent.name: FullTangent,
}


def make_dynamics(name: str, n: int) -> DynamicsModel:
    if name not in DYNAMICS_MODELS:
        raise ScenarioLoadError(
            f"unknown dynamics type {name!r}; choose one of {sorted(DYNAMICS_MODELS)}",
            invalid_fields=["dynamics.type"],
        )
    try:
        return DYNAMICS_MODELS[name](n)
    except DimensionMismatchError as e:
        raise ScenarioLoadError(str(e), invalid_fields=["dimension"]) from e
