from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from Navigation.navigation_function import NavParams, kappa_nav, kappa_single, phi
from World.sphere_world import SphereWorld


class VirtualController(ABC):
    """
    A static feedback v = kappa(xi, xi_d) for the integrator xi' = v on a
    sphere world. Any implementation can be lifted to the sphere.
    """

    @abstractmethod
    def velocity(self, xi: np.ndarray, xi_d: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def potential(self, xi: np.ndarray, xi_d: np.ndarray) -> Optional[float]:
        """Value of the underlying potential, if the controller has one."""
        return None


class LinearController(VirtualController):
    """v = -gamma (xi - xi_d), exponentially stable on a single-cone world."""

    def __init__(self, gamma: float):
        if not gamma > 0:
            raise ValueError(f"gamma must be positive, got {gamma!r}")
        self.gamma = gamma

    def velocity(self, xi, xi_d):
        return kappa_single(xi, xi_d, self.gamma)


class NavigationController(VirtualController):
    def __init__(self, world: SphereWorld, params: NavParams):
        self.world = world
        self.params = params

    def velocity(self, xi, xi_d):
        return kappa_nav(self.world, xi, xi_d, self.params)

    def potential(self, xi, xi_d):
        return phi(self.world, xi, xi_d, self.params)
