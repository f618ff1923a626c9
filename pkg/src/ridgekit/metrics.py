"""Quality metrics against reference manifolds, plus the PCA denoising frame.

Distances are brute force (chunked O(|A||B|) pairwise scans); the sets here
are desk scale, so no spatial index is warranted.  Circle and sphere
references are handled analytically -- the distance from x is exactly
``| ||x|| - radius |`` and the projection is the radial one -- so ordering
assertions about them carry no discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud
from .exceptions import DegenerateProjection, InvalidInput
from .spectral import sym_eig

_CHUNK = 2048


def _as_points(obj):
    if isinstance(obj, PointCloud):
        return obj.points
    pts = np.asarray(obj, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise InvalidInput(f"expected a non-empty (n, D) point set, got shape {pts.shape}")
    return pts


class ReferenceManifold:
    """A target manifold points are compared against."""

    def project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def distances(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class CircleManifold(ReferenceManifold):
    radius: float
    dim = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidInput(f"radius must be positive, got {self.radius}")

    def project(self, x):
        return _radial_project(x, self.radius, self.dim)

    def distances(self, points):
        pts = _as_points(points)
        return np.abs(np.linalg.norm(pts, axis=1) - self.radius)


@dataclass(frozen=True)
class SphereManifold(ReferenceManifold):
    radius: float
    dim = 3

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidInput(f"radius must be positive, got {self.radius}")

    def project(self, x):
        return _radial_project(x, self.radius, self.dim)

    def distances(self, points):
        pts = _as_points(points)
        return np.abs(np.linalg.norm(pts, axis=1) - self.radius)


@dataclass(frozen=True)
class ExplicitManifold(ReferenceManifold):
    """A manifold represented by a dense point set (approximate projection)."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _as_points(self.points))

    def project(self, x):
        x = np.asarray(x, dtype=float)
        d = np.linalg.norm(self.points - x[None, :], axis=1)
        return self.points[int(np.argmin(d))]  # argmin: ties by lowest index

    def distances(self, points):
        pts = _as_points(points)
        return _min_distances(pts, self.points)


def _radial_project(x, radius, dim):
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise InvalidInput(f"expected a point of dimension {dim}, got shape {x.shape}")
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise DegenerateProjection("the origin has no unique radial projection")
    return radius * x / norm


def project_reference(manifold: ReferenceManifold, x) -> np.ndarray:
    """Nearest point of the manifold (radial for circle/sphere; ties in
    explicit sets resolved by lowest index)."""
    return manifold.project(np.asarray(x, dtype=float))


def _min_distances(a, b):
    """Per-row min_j ||a_i - b_j||, chunked to bound memory.

    Distances come from explicit differences so d(a_i, b_j) is bitwise equal
    to d(b_j, a_i); directed scans in opposite orders then see identical
    per-pair values.
    """
    out = np.full(a.shape[0], np.inf)
    for lo in range(0, b.shape[0], _CHUNK):
        diff = a[:, None, :] - b[None, lo:lo + _CHUNK, :]
        d2 = np.einsum("mnd,mnd->mn", diff, diff)
        out = np.minimum(out, np.sqrt(d2).min(axis=1))
    return out


def directed_hausdorff(a, b) -> float:
    """max over a of the distance to the nearest point of b."""
    a, b = _as_points(a), _as_points(b)
    return float(_min_distances(a, b).max())


def hausdorff(a, b) -> float:
    """Symmetric Hausdorff distance: the larger of the two directed values."""
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def manifold_distances(points, manifold: ReferenceManifold) -> np.ndarray:
    """Per-point distance to the manifold (exact for circle/sphere)."""
    return manifold.distances(_as_points(points))


def margin(points, manifold: ReferenceManifold) -> float:
    """Mean distance from the points to the manifold."""
    return float(manifold_distances(points, manifold).mean())


def hausdorff_to_projection(points, manifold: ReferenceManifold) -> float:
    """Haus(R, P_M(R)) = max distance to the manifold.

    For a set compared against its own projection the one-sided maximum
    equals the full symmetric Hausdorff distance, so no second direction is
    needed; the equality is asserted in the test suite.
    """
    return float(manifold_distances(points, manifold).max())


def pca_subspace(data, k: int) -> np.ndarray:
    """Orthonormal (D, k) basis of the top-k variance directions.

    Eigenvectors of the centered sample covariance in the deterministic
    convention of :func:`ridgekit.spectral.sym_eig`, so degenerate spectra
    still give a reproducible basis.
    """
    pts = _as_points(data)
    n, dim = pts.shape
    if n < 2:
        raise InvalidInput(f"PCA needs at least two points, got {n}")
    if not 1 <= k <= dim:
        raise InvalidInput(f"subspace dimension k={k} outside 1..{dim}")
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    return sym_eig(cov).vectors[:, :k]


def denoise_mse(clean, estimated, basis: np.ndarray) -> float:
    """Mean squared error (1/m) sum ||U^T clean_i - estimated_i||^2.

    ``clean`` lives in the ambient space; ``estimated`` in the k-dimensional
    coordinate frame of ``basis`` (columns orthonormal).
    """
    clean = _as_points(clean)
    est = _as_points(estimated)
    basis = np.asarray(basis, dtype=float)
    if clean.shape[0] != est.shape[0]:
        raise InvalidInput(f"size mismatch: {clean.shape[0]} clean vs {est.shape[0]} estimated")
    if basis.shape != (clean.shape[1], est.shape[1]):
        raise InvalidInput(f"basis shape {basis.shape} incompatible with "
                           f"{clean.shape[1]}-D clean and {est.shape[1]}-D estimates")
    residual = clean @ basis - est
    return float(np.mean(np.einsum("mk,mk->m", residual, residual)))
