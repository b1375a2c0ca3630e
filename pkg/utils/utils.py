"""Deterministic quasi-uniform point sets on S^n (no RNG involved)."""

import numpy as np
from scipy.special import ndtri

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def circle_points(count: int) -> np.ndarray:
    angles = 2.0 * np.pi * (np.arange(count) + 0.5) / count
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def golden_spiral(count: int) -> np.ndarray:
    i = np.arange(count)
    z = 1.0 - (2.0 * i + 1.0) / count
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    theta = i * GOLDEN_ANGLE
    return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)


def generalized_golden_ratio(d: int) -> float:
    """Positive root of x^(d+1) = x + 1."""
    x = 2.0
    for _ in range(64):
        x = (1.0 + x) ** (1.0 / (d + 1))
    return x


def kronecker_sphere(count: int, dim: int) -> np.ndarray:
    """
    Additive-recurrence points in the unit cube of R^dim pushed through the
    normal quantile and normalized, giving an even spread on S^(dim-1).
    """
    g = generalized_golden_ratio(dim)
    alpha = (1.0 / g) ** np.arange(1, dim + 1)
    u = np.mod(0.5 + np.outer(np.arange(1, count + 1), alpha), 1.0)
    z = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sphere_points(count: int, dim: int) -> np.ndarray:
    """count quasi-uniform unit vectors in R^dim."""
    if dim == 2:
        return circle_points(count)
    if dim == 3:
        return golden_spiral(count)
    return kronecker_sphere(count, dim)
