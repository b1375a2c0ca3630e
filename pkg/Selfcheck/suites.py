"""
Invariant suites run by `sphere_nav.py selfcheck`.

Every suite is deterministic given the seed and reports its worst error per
metric next to the tolerance it is held to. ``perturbation`` is a test hook:
it corrupts an intermediate value so that a passing suite must fail.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from Control.controller import pendulum_sigma_pinv_closed_form, sigma, sigma_pinv
from Control.dynamics import SphericalPendulum
from Geometry.sphere import TangentVector, UnitVector, random_unit_vectors
from Geometry.stereographic import (
    chordal_norm_sq,
    chordal_norm_sq_geodesic,
    distance_sandwich,
    jacobian,
    project,
    unproject,
)
from Navigation.navigation_function import NavParams, grad_phi, phi
from World.sphere_world import (
    ConstraintSet,
    align,
    constraint_set,
    euclidean_margin,
    sphere_margin,
    to_sphere_world,
)

logger = logging.getLogger(__name__)

# keep samples this far (in 1 - x_{n+1}) from the projection pole
POLE_GAP = 0.05
NAV_ORDERS = (3.0, 5.0, 8.0)


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    worst: Dict[str, Tuple[float, float]] = field(default_factory=dict)

    def record(self, metric: str, value: float, tol: float):
        prev = self.worst.get(metric, (0.0, tol))[0]
        self.worst[metric] = (max(prev, float(value)), tol)

    @property
    def passed(self) -> bool:
        return all(value <= tol for value, tol in self.worst.values())


def pendulum_five_cones() -> ConstraintSet:
    """Bounding cone around e_3 and four cones around +-e_1, +-e_2, theta_i = pi/(7+i)."""
    axes = [[0, 0, 1], [1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]]
    return constraint_set(axes, [np.pi / (7 + i) for i in range(5)])


def random_constraint_set(rng: np.random.Generator, n: int, count: int = 3, gap: float = 0.05) -> ConstraintSet:
    """Bounding cone plus up to count-1 pairwise separated cones in random directions."""
    axes = [random_unit_vectors(rng, 1, n + 1)[0]]
    angles = [rng.uniform(0.3, 0.7)]
    for _ in range(200):
        if len(axes) == count:
            break
        a = random_unit_vectors(rng, 1, n + 1)[0]
        t = rng.uniform(0.15, 0.4)
        if all(np.cos(t + s) - a @ b > gap for b, s in zip(axes, angles)):
            axes.append(a)
            angles.append(t)
    return constraint_set(axes, angles)


def _aligned(cset: ConstraintSet) -> ConstraintSet:
    pole = UnitVector.pole(cset.n)
    return align(cset, pole, pole)[0]


def _away_from_pole(rng, count: int, n: int) -> np.ndarray:
    pts = random_unit_vectors(rng, 2 * count + 16, n + 1)
    return pts[pts[:, -1] <= 1.0 - POLE_GAP][:count]


def _rel(err: float, scale: float, floor: float = 1e-300) -> float:
    return err / max(scale, floor)


def chart_identities(n: int, samples: int, rng, perturbation: float = 0.0) -> SuiteResult:
    """Round trips, the chordal and norm identities, Jacobian and its kernel."""
    res = SuiteResult(f"chart identities (n={n})")
    pole = np.zeros(n + 1)
    pole[-1] = 1.0
    pts = _away_from_pole(rng, samples, n)
    others = _away_from_pole(rng, samples, n)
    xis = 3.0 * rng.standard_normal((samples, n))
    h = 1e-5

    for x, y, xi in zip(pts, others, xis):
        ux, uy = UnitVector(x, strict=False), UnitVector(y, strict=False)
        px, py = project(ux).coords, project(uy).coords
        back = unproject(px + perturbation).coords
        res.record("inverse after chart", np.linalg.norm(back - x), 1e-10)
        res.record(
            "chart after inverse",
            _rel(np.linalg.norm(project(unproject(xi)).coords - xi), 1.0 + np.linalg.norm(xi)),
            1e-10,
        )

        direct = float((px - py) @ (px - py))
        res.record("chordal identity", _rel(abs(chordal_norm_sq(ux, uy) - direct), direct, 1e-12), 1e-10)
        res.record(
            "chordal identity (geodesic form)",
            _rel(abs(chordal_norm_sq_geodesic(ux, uy) - direct), direct, 1e-12),
            1e-9,
        )
        norm_sq = (1.0 + x[-1]) / (1.0 - x[-1])
        res.record("norm identity", _rel(abs(px @ px - norm_sq), norm_sq, 1e-12), 1e-10)

        jac = jacobian(ux)
        v = TangentVector.project(ux, rng.standard_normal(n + 1)).vec
        v = v / np.linalg.norm(v)
        fwd = project(UnitVector(np.cos(h) * x + np.sin(h) * v, strict=False)).coords
        bwd = project(UnitVector(np.cos(h) * x - np.sin(h) * v, strict=False)).coords
        fd = (fwd - bwd) / (2.0 * h)
        exact = jac @ v
        res.record("jacobian vs finite differences", _rel(np.linalg.norm(fd - exact), np.linalg.norm(exact)), 1e-6)
        kernel = jac @ (x - pole)
        res.record(
            "jacobian kernel",
            _rel(np.linalg.norm(kernel), np.linalg.norm(jac, 2) * np.linalg.norm(x - pole)),
            1e-10,
        )
        res.checked += 1
    return res


def world_mapping(cset: ConstraintSet, samples: int, rng, label: str) -> SuiteResult:
    """Cone boundaries land on ball boundaries and membership is preserved."""
    res = SuiteResult(f"sphere world mapping ({label})")
    aligned = _aligned(cset)
    world = to_sphere_world(aligned)
    n = aligned.n
    res.record("world invariants", float(len(world.check_invariants())), 0.0)

    per_cone = max(samples // 10, 1)
    for i, con in enumerate(aligned.constraints):
        a, t = con.axis.coords, con.half_angle
        for w in random_unit_vectors(rng, per_cone, n + 1):
            w = w - a * (a @ w)
            nw = np.linalg.norm(w)
            if nw < 1e-6:
                continue
            x = np.cos(t) * a + np.sin(t) * (w / nw)
            if 1.0 - x[-1] < POLE_GAP:
                continue
            xi = project(UnitVector(x, strict=False)).coords
            if i == 0:
                scale = world.workspace_radius
            else:
                ob = world.obstacles[i - 1]
                scale = np.linalg.norm(ob.center.coords) + ob.radius
            m = euclidean_margin(world, xi).values[i]
            res.record("cone boundary to ball boundary", abs(m) / max(scale, 1.0), 1e-9)

    mismatches = 0
    for x in random_unit_vectors(rng, samples, n + 1):
        if 1.0 - x[-1] < 1e-6:
            continue
        sm = sphere_margin(aligned, x).values
        em = euclidean_margin(world, project(UnitVector(x, strict=False)).coords).values
        clear = np.abs(sm) > 1e-9
        mismatches += int(np.any((sm[clear] > 0) != (em[clear] > 0)))
        res.checked += 1
    res.record("membership mismatches", float(mismatches), 0.0)
    return res


def five_point_gradient(f, x: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central differences of a scalar field."""
    out = np.empty(x.size)
    for i, e in enumerate(np.eye(x.size)):
        out[i] = (-f(x + 2 * h * e) + 8 * f(x + h * e) - 8 * f(x - h * e) + f(x - 2 * h * e)) / (12 * h)
    return out


def _interior_points(world, dim: int, rng, count: int, clearance: float) -> List[np.ndarray]:
    rho = world.workspace_radius
    out = []
    while len(out) < count:
        d = rng.standard_normal(dim)
        pt = d / np.linalg.norm(d) * rho * rng.uniform() ** (1.0 / dim)
        if euclidean_margin(world, pt).minimum > clearance * rho:
            out.append(pt)
    return out


def navigation_gradient(
    cset: ConstraintSet, samples: int, rng, label: str, perturbation: float = 0.0
) -> SuiteResult:
    """Analytic grad phi against central differences for several orders k."""
    res = SuiteResult(f"navigation gradient ({label})")
    world = to_sphere_world(_aligned(cset))
    rho = world.workspace_radius
    goal = _interior_points(world, cset.n, rng, 1, 0.05)[0]
    pts = _interior_points(world, cset.n, rng, samples, 0.01)
    h = 1e-4 * max(rho, 1.0)
    for k in NAV_ORDERS:
        params = NavParams(gamma=1.0, k=k)
        for pt in pts:
            g = grad_phi(world, pt, goal, params) + perturbation
            fd = five_point_gradient(lambda p: phi(world, p, goal, params), pt, h)
            res.record(
                f"k={k:g}",
                _rel(np.linalg.norm(g - fd), max(np.linalg.norm(g), 1e-3)),
                1e-6,
            )
            res.checked += 1
    return res


def pendulum_closed_forms(samples: int, rng) -> SuiteResult:
    """Sigma Sigma^T = (1 - x_3)^-2 I_2 and the closed-form Sigma^+."""
    res = SuiteResult("pendulum closed forms")
    model = SphericalPendulum()
    for x in _away_from_pole(rng, samples, 2):
        sig = sigma(model, x)
        expected = np.eye(2) / (1.0 - x[2]) ** 2
        res.record("gram matrix", _rel(np.linalg.norm(sig @ sig.T - expected), np.linalg.norm(expected)), 1e-8)
        numeric = sigma_pinv(model, x)
        closed = pendulum_sigma_pinv_closed_form(x)
        res.record("closed-form pseudo-inverse", _rel(np.linalg.norm(closed - numeric), np.linalg.norm(numeric)), 1e-8)
        res.record("right inverse", np.linalg.norm(sig @ numeric - np.eye(2)), 1e-8)
        res.checked += 1
    return res


def distance_bounds(cset: ConstraintSet, samples: int, rng, label: str) -> SuiteResult:
    """Chordal chart distance stays between the two geodesic bounds in M."""
    res = SuiteResult(f"distance sandwich ({label})")
    aligned = _aligned(cset)
    theta0 = aligned.constraints[0].half_angle
    n = aligned.n
    free = [x for x in random_unit_vectors(rng, 4 * samples, n + 1) if sphere_margin(aligned, x).inside]
    violations = 0
    for x, y in zip(free[0::2], free[1::2]):
        lower, value, upper = distance_sandwich(UnitVector(x, strict=False), UnitVector(y, strict=False), theta0)
        slack = 1e-12 * max(value, 1.0)
        violations += int(value < lower - slack or value > upper + slack)
        res.checked += 1
        if res.checked >= samples:
            break
    res.record("violations", float(violations), 0.0)
    return res


def run_suites(
    n_list: Sequence[int] = (1, 2, 3, 5),
    seed: int = 0,
    samples: int = 10000,
    perturbation: float = 0.0,
) -> List[SuiteResult]:
    rng = np.random.default_rng(seed)
    results = []
    for n in n_list:
        results.append(chart_identities(n, samples, rng, perturbation))

    sets = []
    if 2 in n_list:
        sets.append(("five cones", pendulum_five_cones()))
    for n in n_list:
        for j in range(3):
            sets.append((f"random n={n} #{j}", random_constraint_set(rng, n)))

    for label, cset in sets:
        results.append(world_mapping(cset, samples, rng, label))
    # five cones plus the first random set of every dimension
    for label, cset in [s for s in sets if s[0] == "five cones" or s[0].endswith("#0")]:
        results.append(navigation_gradient(cset, max(samples // 200, 10), rng, label, perturbation))
    for label, cset in sets:
        results.append(distance_bounds(cset, samples, rng, label))
    results.append(pendulum_closed_forms(max(samples // 10, 100), rng))

    for r in results:
        logger.debug("%s: %s (%d checks)", r.name, "pass" if r.passed else "FAIL", r.checked)
    return results
