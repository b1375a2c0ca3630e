"""
Stereographic chart psi: S^n minus the north pole e_{n+1} -> R^n.

    psi(x)      = J_n x / (1 - x_{n+1})
    psi^{-1}(xi) = (2 J_n^T xi + (|xi|^2 - 1) e_{n+1}) / (1 + |xi|^2)

J_n = [I_n | 0] keeps the first n coordinates.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from Geometry.sphere import UnitVector, geodesic_distance
from utils.exceptions import DimensionMismatchError, NavigationDomainError, PoleSingularityError

logger = logging.getLogger(__name__)

EPS_POLE = 1e-9


@dataclass(frozen=True, eq=False)
class EuclideanPoint:
    """A point xi = psi(x) of the chart."""

    coords: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coords, dtype=float).reshape(-1)
        if not np.all(np.isfinite(arr)):
            raise NavigationDomainError("EuclideanPoint entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def n(self) -> int:
        return self.coords.size

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.coords
        return self.coords.astype(dtype)

    def __repr__(self):
        return f"EuclideanPoint({np.array2string(self.coords, precision=6)})"


def _gap(x: np.ndarray, eps_pole: float) -> float:
    gap = 1.0 - x[-1]
    if gap < eps_pole:
        raise PoleSingularityError(
            f"1 - x_(n+1) = {gap:.3e} is below the pole guard {eps_pole:.1e}"
        )
    return gap


def project(x: UnitVector, eps_pole: float = EPS_POLE) -> EuclideanPoint:
    arr = np.asarray(x)
    return EuclideanPoint(arr[:-1] / _gap(arr, eps_pole))


def unproject(xi) -> UnitVector:
    xi = np.asarray(xi, dtype=float)
    sq = float(xi @ xi)
    out = np.empty(xi.size + 1)
    out[:-1] = 2.0 * xi
    out[-1] = sq - 1.0
    # the formula is exact on the sphere; normalize away rounding only
    return UnitVector(out / (1.0 + sq), strict=False)


def jacobian(x: UnitVector, eps_pole: float = EPS_POLE) -> np.ndarray:
    """n x (n+1) Jacobian J_n((1 - x_{n+1}) I + x e_{n+1}^T) / (1 - x_{n+1})^2."""
    arr = np.asarray(x)
    gap = _gap(arr, eps_pole)
    n = arr.size - 1
    jac = np.zeros((n, n + 1))
    jac[:, :n] = np.eye(n) * gap
    jac[:, n] = arr[:-1]
    return jac / gap**2


def pushforward(x: UnitVector, xdot, eps_pole: float = EPS_POLE) -> np.ndarray:
    """xi-velocity of a sphere velocity xdot at x."""
    return jacobian(x, eps_pole) @ np.asarray(xdot, dtype=float)


def chordal_norm_sq(x1: UnitVector, x2: UnitVector, eps_pole: float = EPS_POLE) -> float:
    """|psi(x1) - psi(x2)|^2 = 2(1 - x1^T x2) / ((1 - x1_{n+1})(1 - x2_{n+1}))."""
    a, b = np.asarray(x1), np.asarray(x2)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    # 2(1 - a^T b) = |a - b|^2 on the sphere, without the cancellation
    diff = a - b
    return float(diff @ diff) / (_gap(a, eps_pole) * _gap(b, eps_pole))


def chordal_norm_sq_geodesic(x1: UnitVector, x2: UnitVector) -> float:
    """Same quantity through geodesic distances to each other and to the pole."""
    pole = UnitVector.pole(x1.n)
    num = np.sin(geodesic_distance(x1, x2) / 2.0) ** 2
    den = (
        np.sin(geodesic_distance(x1, pole) / 2.0) ** 2
        * np.sin(geodesic_distance(x2, pole) / 2.0) ** 2
    )
    if den < EPS_POLE**2:
        raise PoleSingularityError("point at the projection pole")
    return float(num / den)


def distance_sandwich(x: UnitVector, xd: UnitVector, theta0: float) -> Tuple[float, float, float]:
    """
    d^2 / pi^2 <= |psi(x) - psi(xd)|^2 <= d^2 / (4 sin^4(theta0/2)) for x, xd
    outside the polar cap of half-angle theta0, with d the geodesic distance.

    Follows from |psi(x) - psi(xd)|^2 = sin^2(d/2) / (sin^2(d_x/2) sin^2(d_xd/2)),
    d_x = d(x, e_{n+1}) in [theta0, pi], and (2/pi) z <= sin z <= z on [0, pi/2].
    The sharper-looking constants 4/pi^2 and sin^-4(theta0) fail near the
    south pole and near the cap respectively.
    """
    d = geodesic_distance(x, xd)
    lower = d**2 / np.pi**2
    upper = d**2 / (4.0 * np.sin(theta0 / 2.0) ** 4)
    return lower, chordal_norm_sq(x, xd), upper
