"""
Navigation function on a Euclidean sphere world:

    phi(xi, xi_d) = q / (q^k + beta(xi))^(1/k),   q = |xi - xi_d|^2

with beta the product of the workspace barrier rho_0^2 - |xi|^2 and the
obstacle barriers |xi - c_i|^2 - r_i^2. Differentiating the quotient gives

    grad phi = (beta * 2(xi - xi_d) - (q / k) * grad beta) / S^(1 + 1/k),   S = q^k + beta

which stays finite on the boundary (beta = 0) as long as xi != xi_d.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from World.sphere_world import SphereWorld, euclidean_margin
from utils.exceptions import DegenerateConfigurationError, NavigationDomainError

logger = logging.getLogger(__name__)

# points this far outside the closed sphere world are still treated as boundary
DOMAIN_TOL = 1e-6
LOG_SPACE_K = 20.0
LOG_BIG = np.log(1e150)


@dataclass(frozen=True)
class NavParams:
    gamma: float = 5.0
    k: float = 5.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if not self.k > 0:
            raise ValueError(f"k must be positive, got {self.k!r}")


def _factors(world: SphereWorld, xi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Barrier values beta_i and their gradients, workspace barrier first."""
    betas = [world.workspace_radius**2 - xi @ xi]
    grads = [-2.0 * xi]
    for obstacle in world.obstacles:
        d = xi - obstacle.center.coords
        betas.append(d @ d - obstacle.radius**2)
        grads.append(2.0 * d)
    return np.array(betas), np.array(grads)


def _product_gradient(betas: np.ndarray, grads: np.ndarray) -> np.ndarray:
    total = np.zeros(grads.shape[1])
    for i in range(betas.size):
        total += np.prod(np.delete(betas, i)) * grads[i]
    return total


def beta(world: SphereWorld, xi) -> Tuple[float, np.ndarray]:
    """beta = prod_i beta_i and grad beta = sum_i (prod_{j != i} beta_j) grad beta_i."""
    xi = np.asarray(xi, dtype=float)
    betas, grads = _factors(world, xi)
    return float(np.prod(betas)), _product_gradient(betas, grads)


def _check_domain(world: SphereWorld, xi: np.ndarray, interior: bool):
    margin = euclidean_margin(world, xi).minimum
    if interior and not margin > 0:
        raise NavigationDomainError(f"xi is not in the open sphere world (margin {margin:.3e})")
    if margin < -DOMAIN_TOL:
        raise NavigationDomainError(f"xi is outside the sphere world (margin {margin:.3e})")


def _log_terms(betas: np.ndarray, q: float, k: float):
    """log q, log beta (-inf for beta <= 0) and log S."""
    with np.errstate(divide="ignore"):
        log_q = np.log(q)
        log_abs = np.log(np.abs(betas))
    log_beta = float(np.sum(log_abs)) if np.prod(np.sign(betas)) > 0 else -np.inf
    log_s = np.logaddexp(k * log_q, log_beta)
    return log_q, log_abs, log_beta, log_s


def _needs_log_space(betas: np.ndarray, q: float, k: float) -> bool:
    if k > LOG_SPACE_K:
        return True
    with np.errstate(divide="ignore"):
        big_q = q > 0 and k * np.log(q) > LOG_BIG
        big_beta = np.sum(np.log(np.abs(betas))) > LOG_BIG
    return bool(big_q or big_beta)


def phi(world: SphereWorld, xi, xi_d, params: NavParams) -> float:
    xi = np.asarray(xi, dtype=float)
    diff = xi - np.asarray(xi_d, dtype=float)
    _check_domain(world, xi, interior=False)
    betas, _ = _factors(world, xi)
    q = float(diff @ diff)
    b = max(float(np.prod(betas)), 0.0)
    if q == 0.0:
        if b == 0.0:
            raise DegenerateConfigurationError("target lies on the sphere-world boundary")
        return 0.0
    if b == 0.0:
        return 1.0
    k = params.k
    if _needs_log_space(betas, q, k):
        log_q, _, _, log_s = _log_terms(betas, q, k)
        return float(np.exp(log_q - log_s / k))
    return float(q / (q**k + b) ** (1.0 / k))


def grad_phi(world: SphereWorld, xi, xi_d, params: NavParams, allow_boundary: bool = False) -> np.ndarray:
    """
    Analytic gradient of phi in its first argument. The domain is the open
    sphere world unless ``allow_boundary`` is set, in which case boundary
    states (beta = 0) evaluate the limit formula.
    """
    xi = np.asarray(xi, dtype=float)
    diff = xi - np.asarray(xi_d, dtype=float)
    _check_domain(world, xi, interior=not allow_boundary)
    betas, grads = _factors(world, xi)
    q = float(diff @ diff)
    k = params.k
    b = max(float(np.prod(betas)), 0.0)
    if q == 0.0:
        if b == 0.0:
            raise DegenerateConfigurationError("target lies on the sphere-world boundary")
        return np.zeros_like(xi)

    p = 1.0 + 1.0 / k
    if not _needs_log_space(betas, q, k):
        s = q**k + b
        return (b * 2.0 * diff - (q / k) * _product_gradient(betas, grads)) / s**p

    log_q, log_abs, log_beta, log_s = _log_terms(betas, q, k)
    signs = np.sign(betas)
    out = np.exp(log_beta - p * log_s) * 2.0 * diff
    for i in range(betas.size):
        rest = np.delete(np.arange(betas.size), i)
        weight = np.exp(log_q - np.log(k) + np.sum(log_abs[rest]) - p * log_s)
        out -= np.prod(signs[rest]) * weight * grads[i]
    return out


def kappa_nav(world: SphereWorld, xi, xi_d, params: NavParams) -> np.ndarray:
    """Negative gradient flow -gamma * grad phi on the closed sphere world."""
    return -params.gamma * grad_phi(world, xi, xi_d, params, allow_boundary=True)


def kappa_single(xi, xi_d, gamma: float) -> np.ndarray:
    return -gamma * (np.asarray(xi, dtype=float) - np.asarray(xi_d, dtype=float))


@dataclass
class CriticalPointScan:
    samples: int
    median_grad_norm: float
    threshold: float
    candidates: List[Tuple[np.ndarray, float, float]] = field(default_factory=list)


def scan_critical_points(
    world: SphereWorld,
    xi_d,
    params: NavParams,
    samples: int = 20000,
    seed: int = 0,
    threshold: float = 1e-2,
    clearance: float = 1e-2,
    goal_radius: float = 1e-1,
) -> CriticalPointScan:
    """
    Sample the open sphere world uniformly and flag points whose gradient norm
    is below ``threshold`` times the median norm, away from the goal and from
    every boundary. Such points indicate stationary points other than the goal,
    i.e. that k is too small for this world.
    """
    xi_d = np.asarray(xi_d, dtype=float)
    n = xi_d.size
    rng = np.random.default_rng(seed)
    rho = world.workspace_radius
    dirs = rng.standard_normal((samples, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    pts = dirs * rho * rng.uniform(size=(samples, 1)) ** (1.0 / n)

    kept, norms = [], []
    for pt in pts:
        margins = euclidean_margin(world, pt)
        if margins.minimum <= clearance * rho or np.linalg.norm(pt - xi_d) <= goal_radius:
            continue
        kept.append(pt)
        norms.append(np.linalg.norm(grad_phi(world, pt, xi_d, params)))
    if not kept:
        return CriticalPointScan(0, float("nan"), threshold)
    norms = np.array(norms)
    median = float(np.median(norms))
    order = np.argsort(norms)
    candidates = [
        (kept[i], float(norms[i]), phi(world, kept[i], xi_d, params))
        for i in order
        if norms[i] < threshold * median
    ]
    logger.info(
        "critical point scan: %d interior samples, %d candidates below %.1e x median",
        len(kept),
        len(candidates),
        threshold,
    )
    return CriticalPointScan(len(kept), median, threshold, candidates)
