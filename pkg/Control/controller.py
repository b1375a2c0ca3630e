"""
Pull a Euclidean controller back to the sphere.

With xi = psi(x) the kinematics become xi' = Sigma(x) u, Sigma = grad psi(x) Pi(x).
Sigma has full row rank away from the pole, so u = Sigma^+ v with
Sigma^+ = Sigma^T (Sigma Sigma^T)^{-1} gives xi' = v exactly.
"""

import logging
from typing import Iterable, Optional, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from Control.dynamics import DynamicsModel
from Geometry.sphere import UnitVector, hat, random_unit_vectors
from Geometry.stereographic import jacobian, project
from Navigation.navigation_function import NavParams
from Navigation.virtual_controllers import LinearController, NavigationController, VirtualController
from World.sphere_world import ConstraintSet, ItemCheck, SphereWorld, sphere_margin
from utils.exceptions import ModeError, NavigationDomainError, NearSingularityError

logger = logging.getLogger(__name__)

COND_LIMIT = 1e12
RANK_TOL = 1e-8
TANGENCY_TOL = 1e-10
MARGIN_TOL = 1e-9
MODES = ("single", "multi")


def sigma(model: DynamicsModel, x) -> np.ndarray:
    """Sigma(x) = grad psi(x) Pi(x), n x m."""
    arr = np.asarray(x, dtype=float)
    return jacobian(arr) @ model.pi_matrix(arr)


def _gram_factor(sig: np.ndarray):
    gram = sig @ sig.T
    cond = np.linalg.cond(gram)
    if not cond <= COND_LIMIT:
        raise NearSingularityError(f"Sigma Sigma^T is ill-conditioned (cond = {cond:.3e})")
    return cho_factor(gram)


def sigma_pinv(model: DynamicsModel, x) -> np.ndarray:
    """Sigma^+ = Sigma^T (Sigma Sigma^T)^{-1}, m x n."""
    sig = sigma(model, x)
    return cho_solve(_gram_factor(sig), sig).T


def apply_pinv(model: DynamicsModel, x, v) -> np.ndarray:
    """Sigma^+ v through a Cholesky solve on the n x n Gram matrix."""
    sig = sigma(model, x)
    return sig.T @ cho_solve(_gram_factor(sig), np.asarray(v, dtype=float))


def pendulum_sigma_pinv_closed_form(x) -> np.ndarray:
    """-Pi(x) ((1 - x_3) I_3 + e_3 x^T) J_2^T for the spherical pendulum."""
    x = np.asarray(x, dtype=float)
    e3 = np.array([0.0, 0.0, 1.0])
    inner = (1.0 - x[2]) * np.eye(3) + np.outer(e3, x)
    return -hat(x) @ inner[:, :2]


def virtual_controller(world: SphereWorld, params: NavParams, mode: str) -> VirtualController:
    if mode == "single":
        return LinearController(params.gamma)
    if mode == "multi":
        return NavigationController(world, params)
    raise ModeError(f"unknown controller mode {mode!r}; choose one of {MODES}")


class LiftedController:
    """
    u(x) = Sigma(x)^+ kappa(psi(x), psi(x_d)) for a fixed aligned constraint set,
    sphere world and target. All states are in the aligned frame.
    """

    def __init__(
        self,
        model: DynamicsModel,
        cset: ConstraintSet,
        world: SphereWorld,
        xd: UnitVector,
        params: NavParams,
        mode: str = "multi",
        margin_tol: float = MARGIN_TOL,
        virtual: Optional[VirtualController] = None,
    ):
        if mode == "single" and len(cset) != 1:
            raise ModeError(f"single mode needs exactly one constraint, got {len(cset)}")
        self.model = model
        self.cset = cset
        self.world = world
        self.xd = xd
        self.xi_d = project(xd).coords
        self.params = params
        self.mode = mode
        self.margin_tol = margin_tol
        self.virtual = virtual or virtual_controller(world, params, mode)

    def evaluate(self, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u, xi, v) at state x."""
        arr = np.asarray(x, dtype=float)
        margin = sphere_margin(self.cset, arr).minimum
        if margin < -self.margin_tol:
            raise NavigationDomainError(f"state is outside the free space (margin {margin:.3e})")
        xi = project(arr).coords
        v = self.virtual.velocity(xi, self.xi_d)
        return apply_pinv(self.model, arr, v), xi, v

    def __call__(self, x) -> np.ndarray:
        return self.evaluate(x)[0]

    def potential(self, x) -> Optional[float]:
        return self.virtual.potential(project(x).coords, self.xi_d)


def control(
    model: DynamicsModel,
    cset: ConstraintSet,
    world: SphereWorld,
    x: UnitVector,
    xd: UnitVector,
    params: NavParams,
    mode: str = "multi",
) -> np.ndarray:
    """Composite control law for an aligned constraint set."""
    return LiftedController(model, cset, world, xd, params, mode)(x)


def _sample_sphere(n: int, samples: int, seed: int, pole_gap: float = 1e-3) -> np.ndarray:
    rng = np.random.default_rng(seed)
    pts = random_unit_vectors(rng, samples, n + 1)
    return pts[pts[:, -1] < 1.0 - pole_gap]


def check_rank(
    model: DynamicsModel,
    samples: int = 200,
    seed: int = 0,
    extra_states: Iterable = (),
) -> ItemCheck:
    """
    Sampled check that Pi(x) has rank n and maps into T_x S^n. Offending
    entries are sample indices.
    """
    pts = list(_sample_sphere(model.n, samples, seed)) + [np.asarray(s, dtype=float) for s in extra_states]
    bad = []
    worst_tangency, min_gap = 0.0, np.inf
    for idx, x in enumerate(pts):
        pi = model.pi_matrix(x)
        sv = np.linalg.svd(pi, compute_uv=False)
        rank = int(np.sum(sv > RANK_TOL * max(sv[0], 1.0)))
        tangency = float(np.linalg.norm(x @ pi))
        worst_tangency = max(worst_tangency, tangency)
        if model.n - 1 < sv.size:
            min_gap = min(min_gap, float(sv[model.n - 1]))
        if rank != model.n or tangency > TANGENCY_TOL:
            bad.append(idx)
    if bad:
        logger.warning("%s: rank/tangency check fails at %d of %d states", model.name, len(bad), len(pts))
    return ItemCheck(
        not bad,
        bad,
        {"samples": len(pts), "worst_tangency": worst_tangency, "min_singular_value": min_gap},
    )


def control_bound(
    lifted: LiftedController,
    samples: int = 2000,
    seed: int = 0,
    extra_states: Iterable = (),
) -> float:
    """
    max |Sigma^+|_2 over sampled states in M times max |kappa| over their images;
    an a priori cap on |u| along any trajectory through the sampled states.
    """
    pts = [x for x in _sample_sphere(lifted.model.n, samples, seed) if sphere_margin(lifted.cset, x).minimum >= 0]
    pts += [np.asarray(s, dtype=float) for s in extra_states]
    max_pinv, max_v = 0.0, 0.0
    for x in pts:
        max_pinv = max(max_pinv, float(np.linalg.norm(sigma_pinv(lifted.model, x), 2)))
        _, xi, v = lifted.evaluate(x)
        max_v = max(max_v, float(np.linalg.norm(v)))
    return max_pinv * max_v
