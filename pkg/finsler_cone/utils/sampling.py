"""Quasi-uniform direction samplers shared by boundary and lightspace sampling."""
import math
from typing import List

import numpy as np


def circle_directions(count: int, phase: float = 0.0) -> np.ndarray:
    angles = phase + 2.0 * math.pi * np.arange(count) / count
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def fibonacci_sphere(count: int) -> np.ndarray:
    golden = math.pi * (3.0 - math.sqrt(5.0))
    k = np.arange(count) + 0.5
    z = 1.0 - 2.0 * k / count
    radius = np.sqrt(1.0 - z * z)
    angles = golden * k
    return np.stack([radius * np.cos(angles), radius * np.sin(angles), z], axis=1)


def sphere_directions(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """Unit vectors in R^dim covering the sphere S^(dim-1).

    S^0 has only two points, so at most two rows come back for dim == 1.
    """
    if dim <= 0 or count <= 0:
        return np.zeros((0, max(dim, 0)))
    if dim == 1:
        return np.array([[1.0], [-1.0]])[: min(count, 2)]
    if dim == 2:
        return circle_directions(count)
    if dim == 3:
        return fibonacci_sphere(count)
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((count, dim))
    return samples / np.linalg.norm(samples, axis=1, keepdims=True)


def hyperspherical_angles(direction: np.ndarray) -> List[float]:
    """Angles (phi_1, ..., phi_{n-1}) of a unit vector in R^n."""
    e = np.asarray(direction, dtype=float)
    n = e.shape[0]
    if n < 2:
        return []
    angles = []
    for i in range(n - 2):
        angles.append(math.atan2(float(np.linalg.norm(e[i + 1:])), float(e[i])))
    angles.append(math.atan2(float(e[n - 1]), float(e[n - 2])))
    return angles


def log_spaced_parameters(horizon: float, count: int = 60, start_fraction: float = 1e-6) -> np.ndarray:
    return horizon * np.logspace(math.log10(start_fraction), 0.0, count)
