"""Seeded samplers shared by the Monte Carlo experiments.

All samplers take an explicit seed or Generator so runs are reproducible;
reductions downstream keep a fixed order.
"""

from __future__ import annotations

import numpy as np


def rng_from(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def fs_points(n: int, seed) -> np.ndarray:
    """Fubini-Study-uniform points as unit vectors in C^3.

    Normalized complex Gaussian triples carry the exact uniform law with no
    chart bias.
    """
    rng = rng_from(seed)
    v = rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1)[:, None]


def sphere_shell(n: int, dim: int, seed) -> np.ndarray:
    """Uniform points on the unit real sphere of C^dim."""
    rng = rng_from(seed)
    v = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    flat = v.view(float).reshape(n, 2 * dim)
    return v / np.linalg.norm(flat, axis=1)[:, None]


def ball_points(n: int, center, radius: float, seed) -> np.ndarray:
    """Uniform points in a round ball of C^2 (real 4-ball)."""
    rng = rng_from(seed)
    sphere = sphere_shell(n, 2, rng)
    r = radius * rng.uniform(0.0, 1.0, n) ** 0.25
    return np.asarray(center, dtype=complex)[None, :] + r[:, None] * sphere


def polydisk_points(n: int, center, radii, seed) -> np.ndarray:
    """Uniform points in a product of disks in C^2."""
    rng = rng_from(seed)
    out = np.empty((n, 2), dtype=complex)
    for k in range(2):
        r = radii[k] * np.sqrt(rng.uniform(0.0, 1.0, n))
        th = rng.uniform(0.0, 2.0 * np.pi, n)
        out[:, k] = center[k] + r * np.exp(1j * th)
    return out


def torus_points(n: int, center, radii, seed) -> np.ndarray:
    """Points on the distinguished boundary torus of a polydisk."""
    rng = rng_from(seed)
    th = rng.uniform(0.0, 2.0 * np.pi, (n, 2))
    return np.asarray(center, dtype=complex)[None, :] + np.asarray(radii)[None, :] * np.exp(
        1j * th
    )
