"""Ridge membership predicates, Gamma matrices, cosine scores, and grid oracles.

The d-dimensional ridge of a twice-differentiable function F is the set

    { x : lambda_{d+1}(H_F(x)) < 0  and  Pi_perp(H_F(x)) grad F(x) = 0 }

where Pi_perp projects onto the trailing D - d eigenvectors of the Hessian.
For F = f o p with f a power transform, the predicate is evaluated on the
scale-free matrix M(x) = hess log p + q g g^T (same eigenvectors and
eigenvalue signs as H_F; see :mod:`ridgekit.transform`), which stays finite
for arbitrarily extreme q.

For a Gaussian KDE the same condition can be written through the weighted
covariance with a rank-one modification

    Gamma(q, x) = sum_i w(x, x_i)(x_i - x)(x_i - x)^T
                  + (q - 1)(c(x) - x)(c(x) - x)^T

because H_(f o p) is a positive multiple of Gamma(q, x) - (h^2/2) I.  The
membership test then reads: the mean-shift vector c(x) - x lies in the span
of the leading d eigenvectors of Gamma, and lambda_{d+1}(Gamma) < h^2/2.
(The alignment is tested against c(x) - x, the gradient direction, not
against c(x) itself.)

Ridges are measure-zero sets, so sampled/grid membership uses a relative
alignment tolerance ``tol_align``; every exported member set carries the
tolerance it was computed with.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .density import BimodalModel, DensityModel, KdeModel, _as_batch
from .exceptions import InvalidInput, ZeroGradient
from .spectral import _apply_sign_convention, eigh_descending
from .transform import PowerTransform, modified_hessian_scaled


@dataclass(frozen=True)
class RidgeQuery:
    """Parameters of a ridge membership question.

    ``tol_align`` is the relative alignment tolerance (dimensionless;
    ``0`` demands exact alignment and will reject essentially every sampled
    point).  ``min_gap`` is the minimum spectral gap lambda_d - lambda_{d+1}
    required for the tangent space to count as well defined; the default 0
    leaves only the strict eigenvalue inequality binding.
    """

    d: int
    tol_align: float = 1e-6
    min_gap: float = 0.0

    def __post_init__(self):
        if self.d < 0:
            raise InvalidInput(f"ridge dimension d must be >= 0, got {self.d}")
        if not self.tol_align >= 0:
            raise InvalidInput(f"tol_align must be >= 0, got {self.tol_align}")
        if not self.min_gap >= 0:
            raise InvalidInput(f"min_gap must be >= 0, got {self.min_gap}")


@dataclass(frozen=True)
class GammaMatrix:
    """Weighted covariance with rank-one modification, evaluated at x."""

    matrix: np.ndarray
    q: float
    x: np.ndarray


class RidgePointCheck(NamedTuple):
    member: bool
    align: float
    gap: float


class KdeRidgeCheck(NamedTuple):
    member: bool
    align: float
    eig_margin: float


def _membership(matrices, directions, d, tol_align, min_gap):
    """Batched ridge test on symmetric matrices with given gradient directions.

    Returns (member, align, lam_next, gap) where lam_next = lambda_{d+1}.
    A zero direction makes the alignment condition vacuous (align = 0).
    """
    dim = matrices.shape[-1]
    if not 0 <= d < dim:
        raise InvalidInput(f"ridge dimension d={d} must satisfy 0 <= d < D={dim}")
    lam, vec = eigh_descending(matrices)
    tail = vec[..., :, d:]  # trailing D - d eigenvectors
    norms = np.linalg.norm(directions, axis=-1)
    comp = np.einsum("...ij,...i->...j", tail, directions)
    with np.errstate(invalid="ignore", divide="ignore"):
        align = np.linalg.norm(comp, axis=-1) / norms
    align = np.where(norms == 0.0, 0.0, align)
    lam_next = lam[..., d]
    if d == 0:
        gap = np.full(lam_next.shape, np.inf)
    else:
        gap = lam[..., d - 1] - lam_next
    member = (align <= tol_align) & (lam_next < 0.0) & (gap >= min_gap)
    return member, align, lam_next, gap


def ridge_membership(model: DensityModel, t: PowerTransform, query: RidgeQuery, x):
    """Batched form of :func:`is_ridge_point`: arrays (member, align, gap)."""
    xb, single = _as_batch(x, model.dim)
    mats = modified_hessian_scaled(model, t, xb)
    g = model.grad_log(xb)
    member, align, _, gap = _membership(mats, g, query.d, query.tol_align, query.min_gap)
    if single:
        return bool(member[0]), float(align[0]), float(gap[0])
    return member, align, gap


def is_ridge_point(model: DensityModel, t: PowerTransform, query: RidgeQuery, x) -> RidgePointCheck:
    """Test whether x lies on the d-dimensional ridge of f o p.

    ``align`` is ||Pi_perp grad(f o p)|| / ||grad(f o p)|| (0 when the
    gradient vanishes: critical points are members whenever the eigenvalue
    condition holds).  ``gap`` is lambda_d - lambda_{d+1} of the modified
    Hessian, reported so callers can reject degenerate tangent spaces.
    """
    member, align, gap = ridge_membership(model, t, query, np.asarray(x, dtype=float))
    return RidgePointCheck(member, align, gap)


def gamma(model: KdeModel, q: float, x, *, rank_one_sign: float = 1.0) -> GammaMatrix:
    """Gamma(q, x) for a KDE model (see module docstring for the formula).

    ``rank_one_sign`` scales the (q - 1) rank-one term and exists solely as a
    fault-injection knob for the self-check suite; leave it at +1.
    """
    xv = np.asarray(x, dtype=float)
    mats, _ = _gamma_batch(model, q, xv[None, :] if xv.ndim == 1 else xv,
                           rank_one_sign=rank_one_sign)
    if xv.ndim == 1:
        return GammaMatrix(matrix=mats[0], q=float(q), x=xv)
    return GammaMatrix(matrix=mats, q=float(q), x=xv)


def gamma_local(model: KdeModel, q: float, x, neighbors: int) -> GammaMatrix:
    """Gamma_I(q, x): the Gamma matrix restricted to the ``neighbors`` nearest
    samples, with the kernel weights renormalized over that index set."""
    xv = np.asarray(x, dtype=float)
    mats, _ = _gamma_batch(model, q, xv[None, :] if xv.ndim == 1 else xv, k=neighbors)
    if xv.ndim == 1:
        return GammaMatrix(matrix=mats[0], q=float(q), x=xv)
    return GammaMatrix(matrix=mats, q=float(q), x=xv)


def _gamma_batch(model: KdeModel, q, x, k=None, rank_one_sign=1.0):
    """(m, D, D) Gamma matrices and (m, D) mean-shift vectors c - x."""
    xb, _ = _as_batch(x, model.dim)
    _, c, s2 = model.local_moments(xb, k=k)
    r = c - xb
    mats = s2 + rank_one_sign * (q - 1.0) * (r[:, :, None] * r[:, None, :])
    return mats, r


def kde_ridge_condition(model: KdeModel, q: float, query: RidgeQuery, x,
                        *, neighbors: int | None = None,
                        rank_one_sign: float = 1.0):
    """Ridge test in Gamma form: alignment of the mean-shift vector with the
    leading-d eigenspace of Gamma(q, x), and lambda_{d+1}(Gamma) < h^2/2.

    Returns :class:`KdeRidgeCheck` (or arrays for a batch of points) with
    ``eig_margin = h^2/2 - lambda_{d+1}(Gamma)``, positive for members.
    Agrees with :func:`is_ridge_point` away from the tolerance boundary.
    """
    xb, single = _as_batch(x, model.dim)
    mats, r = _gamma_batch(model, q, xb, k=neighbors, rank_one_sign=rank_one_sign)
    threshold = model.bandwidth ** 2 / 2.0
    shifted = mats - threshold * np.eye(model.dim)
    member, align, lam_next, _ = _membership(shifted, r, query.d,
                                             query.tol_align, query.min_gap)
    eig_margin = -lam_next  # h^2/2 - lambda_{d+1}(Gamma)
    if single:
        return KdeRidgeCheck(bool(member[0]), float(align[0]), float(eig_margin[0]))
    return member, align, eig_margin


def cosine_score(model: DensityModel, t: PowerTransform, d: int, x) -> float:
    """s(x) = ||Pi grad p|| / ||grad p||, Pi from the leading d eigenvectors
    of the modified Hessian; 1 exactly on the ridge, smaller away from it.

    Raises :class:`ZeroGradient` when the gradient vanishes.
    """
    xv = np.asarray(x, dtype=float)
    g = model.grad_log(xv)
    norm = np.linalg.norm(g)
    if norm == 0.0:
        raise ZeroGradient(f"gradient vanishes at {xv}; cosine score undefined")
    mats = modified_hessian_scaled(model, t, xv)
    _, vec = eigh_descending(mats)
    lead = vec[:, :d]
    s = float(np.linalg.norm(lead.T @ (g / norm)))
    return min(s, 1.0)


def _grid_nodes(box, resolution, dim):
    box = np.asarray(box, dtype=float)
    if box.ndim == 1:
        box = np.tile(box, (dim, 1))
    if box.shape != (dim, 2) or not np.all(np.isfinite(box)):
        raise InvalidInput(f"box must be (lo, hi) per axis for {dim} axes, finite")
    if np.any(box[:, 0] >= box[:, 1]):
        raise InvalidInput("box lower bounds must be below upper bounds")
    if resolution < 2:
        raise InvalidInput(f"resolution must be >= 2, got {resolution}")
    axes = [np.linspace(lo, hi, resolution) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True)
class GridRidgeSet:
    """Ridge membership evaluated on every node of a regular grid."""

    points: np.ndarray
    member: np.ndarray
    align: np.ndarray
    gap: np.ndarray
    resolution: int
    tol_align: float

    @property
    def member_points(self) -> np.ndarray:
        return self.points[self.member]

    def to_csv(self, path) -> None:
        dim = self.points.shape[1]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{i}" for i in range(dim)] + ["member", "align", "gap"])
            for pt, m, a, g in zip(self.points, self.member, self.align, self.gap):
                writer.writerow([repr(float(v)) for v in pt]
                                + [int(m), repr(float(a)), repr(float(g))])


def grid_ridge_set(model: DensityModel, t: PowerTransform, query: RidgeQuery,
                   box, resolution: int) -> GridRidgeSet:
    """Brute-force ridge oracle: run the membership test on every grid node.

    ``box`` is a (lo, hi) pair applied to every axis, or one pair per axis.
    Nodes are in row-major (first axis slowest) order.
    """
    nodes = _grid_nodes(box, resolution, model.dim)
    member, align, gap = ridge_membership(model, t, query, nodes)
    return GridRidgeSet(points=nodes, member=member, align=align, gap=gap,
                        resolution=resolution, tol_align=query.tol_align)


@dataclass(frozen=True)
class NormalField:
    """Cosine scores and unit normal directions of Gamma(q, x) on a 2-D grid.

    ``s`` is NaN where the mean-shift vector vanishes; ``normals`` rows are
    unit vectors u with Pi_perp = u u^T.
    """

    points: np.ndarray
    s: np.ndarray
    normals: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x0", "x1", "s", "u0", "u1"])
            for pt, sv, u in zip(self.points, self.s, self.normals):
                s_cell = "" if np.isnan(sv) else repr(float(sv))
                writer.writerow([repr(float(pt[0])), repr(float(pt[1])), s_cell,
                                 repr(float(u[0])), repr(float(u[1]))])


def normal_field(model: KdeModel, q: float, box, resolution: int, d: int = 1) -> NormalField:
    """Evaluate s(x) and the estimated normal direction of Gamma(q, x) on a
    regular 2-D grid (d = 1 tangent dimension)."""
    if model.dim != 2 or d != 1:
        raise InvalidInput("normal fields are defined for 2-D models with d = 1")
    nodes = _grid_nodes(box, resolution, model.dim)
    mats, r = _gamma_batch(model, q, nodes)
    _, vec = eigh_descending(mats)
    lead = vec[..., :, :d]
    norms = np.linalg.norm(r, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.linalg.norm(np.einsum("mij,mi->mj", lead, r), axis=1) / norms
    s = np.where(norms == 0.0, np.nan, np.minimum(s, 1.0))
    normals = _apply_sign_convention(vec[..., :, -1].T).T
    return NormalField(points=nodes, s=s, normals=normals)


def analytic_ridge_unimodal(q: float, x, band: float = 1e-9) -> bool:
    """Closed-form membership in the 1-D ridge of f^q o p for the unimodal
    model p = exp(-x1^2 - 2 x2^2), within a spatial band around the exact set.

    Cases (derived from the diagonal Hessian 4 p^q diag(-1/2 + q x1^2, -1)
    on the x1 axis and 4 p^q diag(-1/2, -1 + 4 q x2^2) on the x2 axis):

    * q < 0:      {(x1, 0) : x1^2 < -1/(2q)}
    * q = 0:      the whole x1 axis
    * 0 < q <= 1: the x1 axis plus {(0, x2) : x2^2 >= 1/(8q)} -- the branch
      opens where the tangential eigenvalue -1 + 4 q x2^2 reaches -1/2.
      Ties of the two eigenvalues are counted as members (measure zero).
    """
    if q > 1:
        raise InvalidInput(f"power exponent q must be <= 1, got {q}")
    x1, x2 = float(x[0]), float(x[1])
    on_axis = abs(x2) <= band
    if q < 0:
        return bool(on_axis and x1 * x1 < -1.0 / (2.0 * q))
    if q == 0:
        return bool(on_axis)
    return bool(on_axis or (abs(x1) <= band and x2 * x2 >= 1.0 / (8.0 * q)))


def analytic_ridge_bimodal(q: float, a: float, x, band: float = 1e-9,
                           roots=None) -> bool:
    """Closed-form membership in the 1-D ridge of f^q o p for the two-bump
    model (see :class:`BimodalModel`), within a spatial band.

    With delta = delta*(x1) and v1 = x1 + a*delta:

    * q = 0:      the whole x1 axis
    * q < 0:      {(x1, 0) : 1/2 + a^2 (1 - delta^2) > -q v1^2}
    * 0 < q <= 1: the x1 axis plus off-axis points with x1 in the root set
      S = {x1 : v1 = 0}, where membership needs the tangential eigenvalue to
      lead, 4 q x2^2 >= 1/2 + a^2 (1 - delta^2), and a negative normal
      eigenvalue, a^2 (1 - delta^2) < 1/2.

    ``roots`` may carry a precomputed ``BimodalModel(a).axis_roots()`` to
    avoid re-solving for S on every call.
    """
    if q > 1:
        raise InvalidInput(f"power exponent q must be <= 1, got {q}")
    model = BimodalModel(a)
    x1, x2 = float(x[0]), float(x[1])
    delta = float(model.delta(x1))
    spread = a * a * (1.0 - delta * delta)
    on_axis = abs(x2) <= band
    if q == 0:
        return bool(on_axis)
    if q < 0:
        v1 = x1 + a * delta
        return bool(on_axis and 0.5 + spread > -q * v1 * v1)
    if on_axis:
        return True
    if roots is None:
        roots = model.axis_roots()
    if not np.any(np.abs(np.asarray(roots) - x1) <= band):
        return False
    return bool(spread < 0.5 and x2 * x2 >= (0.5 + spread) / (4.0 * q))
