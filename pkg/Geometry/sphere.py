"""
Points, tangent vectors and distances on the unit n-sphere S^n in R^{n+1}.
"""

import logging
from dataclasses import InitVar, dataclass

import numpy as np

from utils.exceptions import (
    DegenerateVectorError,
    DimensionMismatchError,
    NotTangentError,
    NotUnitError,
)

logger = logging.getLogger(__name__)

UNIT_TOL = 1e-12
TANGENT_TOL = 1e-10
MIN_NORM = 1e-8
# below this in-plane component a and b are treated as (anti)parallel
PARALLEL_TOL = 1e-12


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class UnitVector:
    """
    A point on S^n stored as its embedding coordinates.

    With ``strict=True`` (default) the coordinates must already have unit norm
    to UNIT_TOL; with ``strict=False`` they are normalized, which is the path
    ODE integration uses.
    """

    coords: np.ndarray
    strict: InitVar[bool] = True

    def __post_init__(self, strict: bool):
        arr = np.asarray(self.coords, dtype=float).reshape(-1)
        if arr.size < 2:
            raise DimensionMismatchError(
                f"S^n needs at least 2 coordinates, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise NotUnitError("non-finite coordinates")
        norm = np.linalg.norm(arr)
        if abs(norm - 1.0) > UNIT_TOL:
            if strict:
                raise NotUnitError(f"|x| = {norm!r} deviates from 1 by more than {UNIT_TOL}")
            if norm <= MIN_NORM:
                raise DegenerateVectorError(f"cannot normalize vector of norm {norm!r}")
            arr = arr / norm
        object.__setattr__(self, "coords", _frozen(arr))

    @property
    def n(self) -> int:
        """Intrinsic dimension of the sphere the point lives on."""
        return self.coords.size - 1

    def __len__(self):
        return self.coords.size

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.coords
        return self.coords.astype(dtype)

    def __neg__(self) -> "UnitVector":
        return UnitVector(-self.coords)

    def __repr__(self):
        return f"UnitVector({np.array2string(self.coords, precision=6)})"

    @classmethod
    def axis(cls, index: int, dim: int) -> "UnitVector":
        """Canonical basis vector e_{index+1} of R^dim."""
        e = np.zeros(dim)
        e[index] = 1.0
        return cls(e)

    @classmethod
    def pole(cls, n: int) -> "UnitVector":
        """The north pole e_{n+1} of S^n."""
        return cls.axis(n, n + 1)


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: UnitVector
    vec: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=float).reshape(-1)
        if vec.size != self.base.coords.size:
            raise DimensionMismatchError(
                f"tangent vector has {vec.size} entries, base point {self.base.coords.size}"
            )
        residual = abs(float(self.base.coords @ vec))
        if residual > TANGENT_TOL * (1.0 + np.linalg.norm(vec)):
            raise NotTangentError(f"|x^T v| = {residual:.3e} is not tangent")
        object.__setattr__(self, "vec", _frozen(vec))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.vec
        return self.vec.astype(dtype)

    @classmethod
    def project(cls, base: UnitVector, v) -> "TangentVector":
        """Orthogonal projection (I - x x^T) v onto T_x S^n."""
        x = base.coords
        v = np.asarray(v, dtype=float)
        return cls(base, v - x * (x @ v))


def _check_same_dim(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")


def geodesic_distance(x: UnitVector, y: UnitVector) -> float:
    """
    Angle arccos(x^T y) in [0, pi], evaluated as 2 atan2(|x - y|, |x + y|)
    so that nearly equal and nearly antipodal pairs keep full precision.
    """
    a, b = np.asarray(x), np.asarray(y)
    _check_same_dim(a, b)
    return float(2.0 * np.arctan2(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def renormalize(x) -> UnitVector:
    arr = np.asarray(x, dtype=float)
    norm = np.linalg.norm(arr)
    if norm <= MIN_NORM:
        raise DegenerateVectorError(f"cannot renormalize vector of norm {norm!r}")
    return UnitVector(arr / norm, strict=False)


def rotation_aligning(a: UnitVector, b: UnitVector) -> np.ndarray:
    """
    Rotation R in SO(n+1) with R a = b, acting only in the plane span{a, b}.

    For antipodal inputs the plane is spanned by a and the lowest-index
    coordinate axis not parallel to a, and R is the half-turn in that plane.
    """
    u, v = np.asarray(a), np.asarray(b)
    _check_same_dim(u, v)
    dim = u.size
    eye = np.eye(dim)
    c = float(np.clip(u @ v, -1.0, 1.0))
    w = v - c * u
    s = np.linalg.norm(w)
    if s < PARALLEL_TOL:
        if c > 0:
            return eye
        for k in range(dim):
            if abs(u[k]) < 1.0 - 1e-9:
                w = eye[k] - u[k] * u
                break
        w = w / np.linalg.norm(w)
        logger.debug("antipodal alignment, rotating by pi in plane with axis %d", k)
        return eye - 2.0 * np.outer(u, u) - 2.0 * np.outer(w, w)
    w = w / s
    return (
        eye
        + s * (np.outer(w, u) - np.outer(u, w))
        + (c - 1.0) * (np.outer(u, u) + np.outer(w, w))
    )


def random_unit_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Uniform samples on S^{dim-1}, one per row."""
    g = rng.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def hat(v) -> np.ndarray:
    """Skew matrix with hat(v) @ u == cross(v, u)."""
    x, y, z = np.asarray(v, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
