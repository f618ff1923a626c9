"""Seeded synthetic data generators for the experiments.

Reproducibility rule: every generator derives one child PCG64 stream per
point index from ``SeedSequence(seed).spawn(m)``, so clouds are bit-identical
across runs and independent of any parallel evaluation order.  Per-point draw
order is documented in each generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud
from .exceptions import InvalidInput

SWISS_ROLL_ANGLES = (np.pi / 2.0, 3.0 * np.pi)  # spiral r = theta / (2 pi)

#: axis standard deviations of each bimodal mixture component
_BIMODAL_STD = np.array([np.sqrt(0.5), 0.5])


@dataclass(frozen=True)
class NoiseSpec:
    """Isotropic Gaussian noise level and the 64-bit seed of a generator."""

    sigma: float
    seed: int

    def __post_init__(self):
        if not self.sigma >= 0:
            raise InvalidInput(f"sigma must be >= 0, got {self.sigma}")


def _streams(seed, m):
    return [np.random.Generator(np.random.PCG64(child))
            for child in np.random.SeedSequence(seed).spawn(m)]


def sample_circle(m: int, radius: float, noise: NoiseSpec) -> PointCloud:
    """m noisy points on the circle of the given radius.

    Angles are stratified: point j draws u ~ U[0, 1) and sits at angle
    2 pi (j + u) / m, then adds N(0, sigma^2 I_2) noise (u first, noise
    second in the per-point stream).
    """
    if m < 1:
        raise InvalidInput(f"m must be >= 1, got {m}")
    pts = np.empty((m, 2))
    for j, rng in enumerate(_streams(noise.seed, m)):
        theta = 2.0 * np.pi * (j + rng.random()) / m
        pts[j] = radius * np.array([np.cos(theta), np.sin(theta)])
        pts[j] += noise.sigma * rng.standard_normal(2)
    return PointCloud(pts)


def sample_sphere(m: int, radius: float, noise: NoiseSpec) -> PointCloud:
    """m noisy points on the 2-sphere in R^3.

    Directions are normalized standard Gaussians (draw order: direction,
    then ambient N(0, sigma^2 I_3) noise)."""
    if m < 1:
        raise InvalidInput(f"m must be >= 1, got {m}")
    pts = np.empty((m, 3))
    for j, rng in enumerate(_streams(noise.seed, m)):
        v = rng.standard_normal(3)
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            v, norm = np.array([1.0, 0.0, 0.0]), 1.0
        pts[j] = radius * v / norm + noise.sigma * rng.standard_normal(3)
    return PointCloud(pts)


def sample_swiss_roll_2d(m: int, noise: NoiseSpec) -> PointCloud:
    """m noisy points on the planar spiral r(theta) = theta / (2 pi),
    theta stratified over [pi/2, 3 pi] (u first, noise second per point)."""
    if m < 1:
        raise InvalidInput(f"m must be >= 1, got {m}")
    lo, hi = SWISS_ROLL_ANGLES
    pts = np.empty((m, 2))
    for j, rng in enumerate(_streams(noise.seed, m)):
        theta = lo + (j + rng.random()) / m * (hi - lo)
        r = theta / (2.0 * np.pi)
        pts[j] = r * np.array([np.cos(theta), np.sin(theta)])
        pts[j] += noise.sigma * rng.standard_normal(2)
    return PointCloud(pts)


def sample_bimodal(m: int, a: float, noise: NoiseSpec) -> PointCloud:
    """m draws from the two-component Gaussian mixture with means (+-a, 0),
    per-axis standard deviations (sqrt(1/2), 1/2), and equal weights.

    Per-point draw order: component coin, standard normal pair, then the
    optional extra N(0, sigma^2 I_2) noise (the mixture itself is exact for
    sigma = 0)."""
    if m < 1:
        raise InvalidInput(f"m must be >= 1, got {m}")
    if a < 0:
        raise InvalidInput(f"mode separation a must be >= 0, got {a}")
    pts = np.empty((m, 2))
    for j, rng in enumerate(_streams(noise.seed, m)):
        sign = 1.0 if rng.random() < 0.5 else -1.0
        pts[j] = np.array([sign * a, 0.0]) + _BIMODAL_STD * rng.standard_normal(2)
        pts[j] += noise.sigma * rng.standard_normal(2)
    return PointCloud(pts)


def add_noise(points, sigma: float, seed: int) -> np.ndarray:
    """points + N(0, sigma^2 I), one child stream per point index."""
    pts = np.asarray(points, dtype=float)
    if sigma < 0:
        raise InvalidInput(f"sigma must be >= 0, got {sigma}")
    out = pts.copy()
    for j, rng in enumerate(_streams(seed, pts.shape[0])):
        out[j] += sigma * rng.standard_normal(pts.shape[1])
    return out
