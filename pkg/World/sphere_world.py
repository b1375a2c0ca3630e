"""
Conic keep-out zones on S^n and their image, the Euclidean sphere world.

A cone O_i = {x : x^T a_i > cos(theta_i)} is mapped by the stereographic chart
to the open ball |xi - c_i| < r_i (i >= 1) or, for the bounding cone O_0 with
axis e_{n+1}, to the exterior |xi| > cot(theta_0 / 2) of the workspace ball.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from Geometry.sphere import UnitVector, geodesic_distance, rotation_aligning
from Geometry.stereographic import EuclideanPoint
from utils.exceptions import (
    DimensionMismatchError,
    InconsistentConstraintsError,
    InvalidConstraintError,
    ScenarioValidationError,
)

logger = logging.getLogger(__name__)

START_TOL = 1e-12
TARGET_MARGIN = 1e-9
ALIGN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ConicConstraint:
    axis: UnitVector
    half_angle: float

    def __post_init__(self):
        if not 0.0 < self.half_angle < np.pi / 2:
            raise InvalidConstraintError(
                f"half angle {self.half_angle!r} is outside (0, pi/2)"
            )

    def rotated(self, rotation: np.ndarray) -> "ConicConstraint":
        return ConicConstraint(UnitVector(rotation @ self.axis.coords, strict=False), self.half_angle)

    def contains(self, x: UnitVector) -> bool:
        """True when x lies in the open forbidden cone."""
        return float(self.axis.coords @ np.asarray(x)) > np.cos(self.half_angle)


@dataclass(frozen=True, eq=False)
class ConstraintSet:
    """
    Ordered cones; index 0 bounds the workspace. ``alignment`` is the rotation
    that has been applied to the user's axes (identity for a user-frame set).
    """

    constraints: Tuple[ConicConstraint, ...]
    alignment: Optional[np.ndarray] = None

    def __post_init__(self):
        cons = tuple(self.constraints)
        if not cons:
            raise InvalidConstraintError("a constraint set needs at least the bounding cone")
        dims = {c.axis.coords.size for c in cons}
        if len(dims) != 1:
            raise DimensionMismatchError(f"constraint axes have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "constraints", cons)
        if self.alignment is None:
            object.__setattr__(self, "alignment", np.eye(dims.pop()))

    @property
    def n(self) -> int:
        return self.constraints[0].axis.n

    @property
    def axes(self) -> np.ndarray:
        return np.stack([c.axis.coords for c in self.constraints])

    @property
    def half_angles(self) -> np.ndarray:
        return np.array([c.half_angle for c in self.constraints])

    def is_aligned(self, tol: float = ALIGN_TOL) -> bool:
        pole = np.zeros(self.n + 1)
        pole[-1] = 1.0
        return bool(np.linalg.norm(self.constraints[0].axis.coords - pole) <= tol)

    def __len__(self):
        return len(self.constraints)


@dataclass(frozen=True, eq=False)
class BallObstacle:
    center: EuclideanPoint
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InconsistentConstraintsError(f"obstacle radius {self.radius!r} must be positive")


@dataclass(frozen=True, eq=False)
class SphereWorld:
    workspace_radius: float
    obstacles: Tuple[BallObstacle, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if not self.workspace_radius > 0:
            raise InconsistentConstraintsError("workspace radius must be positive")

    @property
    def centers(self) -> np.ndarray:
        if not self.obstacles:
            return np.zeros((0, 0))
        return np.stack([o.center.coords for o in self.obstacles])

    @property
    def radii(self) -> np.ndarray:
        return np.array([o.radius for o in self.obstacles])

    def clearances(self) -> dict:
        """Workspace clearance per obstacle and pairwise obstacle clearances."""
        rho = self.workspace_radius
        workspace = [rho - np.linalg.norm(o.center.coords) - o.radius for o in self.obstacles]
        pairwise = {}
        for (i, a), (j, b) in itertools.combinations(enumerate(self.obstacles, start=1), 2):
            pairwise[(i, j)] = float(
                np.linalg.norm(a.center.coords - b.center.coords) - a.radius - b.radius
            )
        return {"workspace": [float(w) for w in workspace], "pairwise": pairwise}

    def check_invariants(self) -> List[str]:
        problems = []
        gaps = self.clearances()
        for i, w in enumerate(gaps["workspace"], start=1):
            if w <= 0:
                problems.append(f"obstacle {i} is not strictly inside the workspace (clearance {w:.3e})")
        for (i, j), g in gaps["pairwise"].items():
            if g <= 0:
                problems.append(f"obstacles {i} and {j} intersect (clearance {g:.3e})")
        return problems


@dataclass
class ItemCheck:
    passed: bool
    offending: List[int] = field(default_factory=list)
    details: dict = field(default_factory=dict)


@dataclass
class ValidationReport:
    """Outcome of the constraint assumptions, one entry per item."""

    separation: ItemCheck
    alignment: ItemCheck
    start: ItemCheck
    target: ItemCheck
    rank: Optional[ItemCheck] = None

    def items(self):
        out = [
            ("separation", self.separation),
            ("alignment", self.alignment),
            ("start", self.start),
            ("target", self.target),
        ]
        if self.rank is not None:
            out.insert(0, ("rank", self.rank))
        return out

    @property
    def passed(self) -> bool:
        return all(check.passed for _, check in self.items())

    def failures(self) -> List[str]:
        return [name for name, check in self.items() if not check.passed]


@dataclass(frozen=True, eq=False)
class SphereMargins:
    values: np.ndarray
    minimum: float

    @property
    def inside(self) -> bool:
        return self.minimum >= 0.0


@dataclass(frozen=True, eq=False)
class EuclideanMargins:
    values: np.ndarray
    minimum: float

    @property
    def inside(self) -> bool:
        return self.minimum >= 0.0


def sphere_margin(cset: ConstraintSet, x: UnitVector) -> SphereMargins:
    """m_i = cos(theta_i) - x^T a_i; x is in the free space iff every m_i >= 0."""
    arr = np.asarray(x)
    if arr.size != cset.n + 1:
        raise DimensionMismatchError(f"point has {arr.size} coordinates, constraints {cset.n + 1}")
    values = np.cos(cset.half_angles) - cset.axes @ arr
    return SphereMargins(values, float(values.min()))


def euclidean_margin(world: SphereWorld, xi) -> EuclideanMargins:
    """m_0 = rho_0 - |xi|, m_i = |xi - c_i| - r_i."""
    xi = np.asarray(xi, dtype=float)
    values = [world.workspace_radius - np.linalg.norm(xi)]
    for obstacle in world.obstacles:
        values.append(np.linalg.norm(xi - obstacle.center.coords) - obstacle.radius)
    values = np.array(values)
    return EuclideanMargins(values, float(values.min()))


def validate(cset: ConstraintSet, x0: UnitVector, xd: UnitVector) -> ValidationReport:
    """Check pairwise separation, alignment, start in M and target in int(M)."""
    axes, angles = cset.axes, cset.half_angles

    sep_margins = {}
    sep_bad = set()
    for i, j in itertools.combinations(range(len(cset)), 2):
        m = float(np.cos(angles[i] + angles[j]) - axes[i] @ axes[j])
        sep_margins[(i, j)] = m
        if not m > 0:
            sep_bad.update((i, j))
    separation = ItemCheck(not sep_bad, sorted(sep_bad), {"margins": sep_margins})

    rotation = rotation_aligning(cset.constraints[0].axis, UnitVector.pole(cset.n))
    residual = float(np.linalg.norm(rotation @ axes[0] - UnitVector.pole(cset.n).coords))
    alignment = ItemCheck(
        residual <= ALIGN_TOL,
        [] if residual <= ALIGN_TOL else [0],
        {"residual": residual, "rotation": rotation, "already_aligned": cset.is_aligned()},
    )

    def _membership(point: UnitVector, tol: float, strict: bool) -> ItemCheck:
        margins = sphere_margin(cset, point).values
        dists = [geodesic_distance(point, c.axis) - c.half_angle for c in cset.constraints]
        if strict:
            bad = [i for i, m in enumerate(margins) if not m > tol]
        else:
            bad = [i for i, d in enumerate(dists) if d < tol]
        return ItemCheck(not bad, bad, {"margins": margins.tolist(), "angular_margins": dists})

    start = _membership(x0, -START_TOL, strict=False)
    target = _membership(xd, TARGET_MARGIN, strict=True)

    report = ValidationReport(separation, alignment, start, target)
    if not report.passed:
        logger.info("constraint assumptions fail: %s", ", ".join(report.failures()))
    return report


def align(
    cset: ConstraintSet, x0: UnitVector, xd: UnitVector
) -> Tuple[ConstraintSet, UnitVector, UnitVector, np.ndarray]:
    """Rotate everything so that the bounding axis a_0 becomes e_{n+1}."""
    rotation = rotation_aligning(cset.constraints[0].axis, UnitVector.pole(cset.n))
    aligned = ConstraintSet(
        tuple(c.rotated(rotation) for c in cset.constraints),
        alignment=rotation @ cset.alignment,
    )
    return (
        aligned,
        UnitVector(rotation @ x0.coords, strict=False),
        UnitVector(rotation @ xd.coords, strict=False),
        rotation,
    )


def to_sphere_world(cset: ConstraintSet) -> SphereWorld:
    if not cset.is_aligned():
        raise InconsistentConstraintsError("constraint set must be aligned (a_0 = e_(n+1))")
    a0 = cset.constraints[0].axis.coords
    rho0 = 1.0 / np.tan(cset.constraints[0].half_angle / 2.0)
    obstacles = []
    for i, con in enumerate(cset.constraints[1:], start=1):
        a = con.axis.coords
        den = np.cos(con.half_angle) - a0 @ a
        if not den > 0:
            raise InconsistentConstraintsError(
                f"cone {i}: cos(theta) - a_0^T a = {den:.3e} is not positive; was validation skipped?"
            )
        obstacles.append(BallObstacle(EuclideanPoint(a[:-1] / den), float(np.sin(con.half_angle) / den)))
    world = SphereWorld(float(rho0), tuple(obstacles))
    problems = world.check_invariants()
    if problems:
        raise InconsistentConstraintsError("; ".join(problems))
    logger.debug("sphere world: rho0=%.6f with %d obstacles", rho0, len(obstacles))
    return world


@dataclass(frozen=True, eq=False)
class ConstrainedProblem:
    """
    A validated constraint set in the aligned frame together with its sphere
    world. ``rotation`` maps user-frame vectors to the aligned frame.
    """

    user_set: ConstraintSet
    aligned_set: ConstraintSet
    world: SphereWorld
    rotation: np.ndarray
    x0: UnitVector
    xd: UnitVector
    report: ValidationReport

    @property
    def n(self) -> int:
        return self.aligned_set.n

    def to_aligned_frame(self, x) -> UnitVector:
        return UnitVector(self.rotation @ np.asarray(x, dtype=float), strict=False)

    def to_user_frame(self, x) -> np.ndarray:
        return self.rotation.T @ np.asarray(x, dtype=float)


def prepare(cset: ConstraintSet, x0: UnitVector, xd: UnitVector) -> ConstrainedProblem:
    """Validate, align and map; raises ScenarioValidationError on failure."""
    report = validate(cset, x0, xd)
    if not report.passed:
        raise ScenarioValidationError(
            f"constraint assumptions fail: {', '.join(report.failures())}", report
        )
    aligned, ax0, axd, rotation = align(cset, x0, xd)
    return ConstrainedProblem(cset, aligned, to_sphere_world(aligned), rotation, ax0, axd, report)


def constraint_set(axes: Sequence, angles: Sequence[float]) -> ConstraintSet:
    """Build a user-frame ConstraintSet from raw axes (normalized) and angles."""
    if len(axes) != len(angles):
        raise InvalidConstraintError(f"{len(axes)} axes but {len(angles)} angles")
    return ConstraintSet(
        tuple(ConicConstraint(UnitVector(a, strict=False), float(t)) for a, t in zip(axes, angles))
    )
