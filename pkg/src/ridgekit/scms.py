"""Subspace-constrained mean shift with four interchangeable method variants.

Every variant iterates  x <- x + kappa * Pi_perp(x) mu(x)  until the
displacement falls below epsilon, where mu is an attraction force pulling x
towards the samples and Pi_perp projects onto the estimated normal space:

=========  ==========================  ================================
method     attraction force mu(x)      intermediate matrix
=========  ==========================  ================================
score      c(x) - x                    Gamma(q, x), all samples
l-score    c_I(x) - x                  Gamma_I(q, x), k nearest samples
mfit-i     sum_i a_i(x) P_i (x_i - x)  sum_i a_i(x) P_i
mfit-ii    sum_i a_i(x) (x_i - x)      sum_i a_i(x) P_i
=========  ==========================  ================================

For score / l-score the normal projector removes the leading d eigenvectors
of Gamma (the tangent estimate): Pi_perp = I - U U^T.  For the mfit variants
the intermediate matrix is a convex combination of per-sample normal
projectors P_i = I - V_i V_i^T, so its *leading* D - d eigenspace already
estimates the normal space and Pi_perp = U U^T is built from those leading
eigenvectors directly.  Both conventions make the step contract towards the
sample manifold.

The per-sample weights a_i(x) are normalized Gaussian weights
exp(-||x - x_i||^2 / r^2) supported on ||x - x_i|| <= 2r, and V_i holds the
top-d local PCA directions of the samples within radius r of x_i (computed
once per run).  The length scales h (kernel bandwidth) and r (neighborhood
radius) may instead be derived per evaluation point as the distance to the
K-th nearest sample (``knn_scale``).

Runs are deterministic: there is no randomness anywhere in the iteration and
points are processed in lockstep with a fixed eigenvector convention.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, replace

import numpy as np

from .cloud import PointCloud
from .density import KdeModel, _as_batch
from .exceptions import InvalidInput, IsolatedPoint
from .spectral import eigh_descending

_EPS_DIAMETER_FACTOR = 1e-7


class MethodKind(enum.Enum):
    SCORE = "score"
    L_SCORE = "l-score"
    MFIT_I = "mfit-i"
    MFIT_II = "mfit-ii"

    @classmethod
    def parse(cls, name: str) -> "MethodKind":
        key = name.strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == key:
                return kind
        raise InvalidInput(f"unknown method {name!r}; expected one of "
                           f"{[k.value for k in cls]}")

    @property
    def is_mfit(self) -> bool:
        return self in (MethodKind.MFIT_I, MethodKind.MFIT_II)


@dataclass(frozen=True)
class ScmsConfig:
    """Configuration of one SCMS run; see the module docstring for roles.

    ``epsilon`` defaults to 1e-7 times the sample diameter when left None.
    ``q`` only affects score / l-score.  ``knn_scale`` replaces a fixed
    bandwidth/radius by the per-point distance to the K-th nearest sample.
    """

    method: MethodKind
    d: int
    q: float = 0.0
    bandwidth: float | None = None
    neighbors: int | None = None
    radius: float | None = None
    knn_scale: int | None = None
    epsilon: float | None = None
    kappa: float = 1.0
    max_iters: int = 500

    def __post_init__(self):
        if isinstance(self.method, str):
            object.__setattr__(self, "method", MethodKind.parse(self.method))
        if self.d < 0:
            raise InvalidInput(f"ridge dimension d must be >= 0, got {self.d}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise InvalidInput(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.kappa <= 1:
            raise InvalidInput(f"step size kappa must be in (0, 1], got {self.kappa}")
        if self.max_iters < 1:
            raise InvalidInput(f"max_iters must be >= 1, got {self.max_iters}")
        if self.knn_scale is not None and self.knn_scale < 1:
            raise InvalidInput(f"knn_scale must be >= 1, got {self.knn_scale}")
        if self.method.is_mfit:
            if (self.radius is None) == (self.knn_scale is None):
                raise InvalidInput(f"{self.method.value} needs exactly one of radius or knn_scale")
            if self.radius is not None and not self.radius > 0:
                raise InvalidInput(f"radius must be positive, got {self.radius}")
        else:
            if (self.bandwidth is None) == (self.knn_scale is None):
                raise InvalidInput(f"{self.method.value} needs exactly one of bandwidth or knn_scale")
            if self.bandwidth is not None and not self.bandwidth > 0:
                raise InvalidInput(f"bandwidth must be positive, got {self.bandwidth}")
            if self.method is MethodKind.L_SCORE and self.neighbors is None:
                raise InvalidInput("l-score needs a neighbor count")
        if self.neighbors is not None and self.neighbors < 1:
            raise InvalidInput(f"neighbors must be >= 1, got {self.neighbors}")


@dataclass(frozen=True)
class ScmsState:
    """Read-only per-run data shared by all points."""

    config: ScmsConfig
    samples: np.ndarray
    epsilon: float
    kde: KdeModel | None = None
    sample_projectors: np.ndarray | None = None


@dataclass(frozen=True)
class ScmsResult:
    output: PointCloud
    iterations: np.ndarray
    converged: np.ndarray
    final_align: np.ndarray

    def to_csv(self, path) -> None:
        dim = self.output.dim
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{i}" for i in range(dim)]
                            + ["iterations", "converged", "final_align"])
            for pt, it, cv, al in zip(self.output.points, self.iterations,
                                      self.converged, self.final_align):
                cell = "" if np.isnan(al) else repr(float(al))
                writer.writerow([repr(float(v)) for v in pt] + [int(it), int(cv), cell])


def _pairwise_sq(a, b):
    return np.maximum(
        np.einsum("md,md->m", a, a)[:, None]
        - 2.0 * (a @ b.T)
        + np.einsum("nd,nd->n", b, b)[None, :],
        0.0,
    )


def _diameter(samples):
    best = 0.0
    for lo in range(0, samples.shape[0], 2048):
        d2 = _pairwise_sq(samples[lo:lo + 2048], samples)
        best = max(best, float(d2.max(initial=0.0)))
    return np.sqrt(best)


def _knn_distance(d2, k):
    """Per-row distance to the k-th nearest column (1-based, ties by index)."""
    if k > d2.shape[1]:
        raise InvalidInput(f"knn_scale {k} exceeds sample count {d2.shape[1]}")
    part = np.sort(d2, axis=1)[:, k - 1]
    return np.sqrt(part)


def _local_pca_projectors(samples, radii, d):
    """Normal projectors I - V V^T from top-d PCA of each sample's r-ball."""
    n, dim = samples.shape
    out = np.empty((n, dim, dim))
    eye = np.eye(dim)
    d2 = _pairwise_sq(samples, samples)
    for i in range(n):
        inside = samples[d2[i] <= radii[i] ** 2]
        centered = inside - inside.mean(axis=0)
        cov = centered.T @ centered / max(len(inside), 1)
        _, vec = eigh_descending(cov)
        v = vec[:, :d]
        out[i] = eye - v @ v.T
    return out


def build_state(config: ScmsConfig, samples) -> ScmsState:
    """Validate the configuration against the sample cloud and precompute the
    shared read-only state (KDE, per-sample projectors, default epsilon)."""
    if isinstance(samples, PointCloud):
        pts = samples.points
    else:
        pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise InvalidInput(f"need an (n, D) sample array, got shape {pts.shape}")
    n, dim = pts.shape
    if config.d >= dim:
        raise InvalidInput(f"ridge dimension d={config.d} must be < D={dim}")
    if config.neighbors is not None and config.neighbors > n:
        raise InvalidInput(f"neighbors {config.neighbors} exceeds sample count {n}")
    if config.knn_scale is not None and config.knn_scale > n:
        raise InvalidInput(f"knn_scale {config.knn_scale} exceeds sample count {n}")
    diameter = _diameter(pts)
    epsilon = config.epsilon
    if epsilon is None:
        scale = diameter if diameter > 0 else max(1.0, float(np.abs(pts).max()))
        epsilon = _EPS_DIAMETER_FACTOR * scale
        config = replace(config, epsilon=epsilon)
    kde = None
    projectors = None
    if config.method.is_mfit:
        if config.radius is not None:
            radii = np.full(n, config.radius)
        else:
            radii = _knn_distance(_pairwise_sq(pts, pts), config.knn_scale)
        projectors = _local_pca_projectors(pts, radii, config.d)
    elif config.bandwidth is not None:
        kde = KdeModel(pts, config.bandwidth)
    return ScmsState(config=config, samples=pts, epsilon=float(epsilon),
                     kde=kde, sample_projectors=projectors)


def _score_parts(state: ScmsState, x):
    """(mu, gamma) for score / l-score at a batch of points."""
    config = state.config
    k = config.neighbors if config.method is MethodKind.L_SCORE else None
    if state.kde is not None:
        _, c, s2 = state.kde.local_moments(x, k=k)
    else:
        d2 = _pairwise_sq(x, state.samples)
        h = _knn_distance(d2, config.knn_scale)
        h = np.where(h > 0, h, np.finfo(float).tiny ** 0.25)
        logits = -d2 / h[:, None] ** 2
        if k is not None:
            order = np.argsort(-logits, axis=1, kind="stable")[:, :k]
            order.sort(axis=1)
            rows = np.arange(x.shape[0])[:, None]
            sel = logits[rows, order]
            sel -= sel.max(axis=1, keepdims=True)
            wsel = np.exp(sel)
            wsel /= wsel.sum(axis=1, keepdims=True)
            w = np.zeros_like(logits)
            w[rows, order] = wsel
        else:
            logits -= logits.max(axis=1, keepdims=True)
            w = np.exp(logits)
            w /= w.sum(axis=1, keepdims=True)
        c = w @ state.samples
        diff = state.samples[None, :, :] - x[:, None, :]
        s2 = np.einsum("mn,mni,mnj->mij", w, diff, diff)
    r = c - x
    mats = s2 + (config.q - 1.0) * (r[:, :, None] * r[:, None, :])
    return r, mats


def _mfit_parts(state: ScmsState, x):
    """(mu, matrix, isolated) for the mfit variants at a batch of points."""
    config = state.config
    d2 = _pairwise_sq(x, state.samples)
    if config.radius is not None:
        r = np.full(x.shape[0], config.radius)
    else:
        r = _knn_distance(d2, config.knn_scale)
        r = np.where(r > 0, r, np.finfo(float).tiny ** 0.25)
    support = d2 <= (2.0 * r[:, None]) ** 2
    logits = np.where(support, -d2 / r[:, None] ** 2, -np.inf)
    isolated = ~support.any(axis=1)
    safe = np.where(isolated[:, None], 0.0, logits)
    safe = safe - safe.max(axis=1, keepdims=True)
    alpha = np.where(support, np.exp(safe), 0.0)
    total = alpha.sum(axis=1, keepdims=True)
    alpha = np.divide(alpha, total, out=np.zeros_like(alpha), where=total > 0)
    mats = np.einsum("mn,nij->mij", alpha, state.sample_projectors)
    diff = state.samples[None, :, :] - x[:, None, :]
    if config.method is MethodKind.MFIT_I:
        mu = np.einsum("mn,nij,mnj->mi", alpha, state.sample_projectors, diff)
    else:
        mu = np.einsum("mn,mnd->md", alpha, diff)
    return mu, mats, isolated


def _batch_parts(state: ScmsState, x):
    if state.config.method.is_mfit:
        return _mfit_parts(state, x)
    mu, mats = _score_parts(state, x)
    return mu, mats, np.zeros(x.shape[0], dtype=bool)


def _normal_projected(state: ScmsState, mats, vectors):
    """Apply the method's normal projector Pi_perp to a batch of vectors."""
    config = state.config
    dim = mats.shape[-1]
    _, vec = eigh_descending(mats)
    if config.method.is_mfit:
        u = vec[..., :, :dim - config.d]  # leading eigenspace is the normal estimate
        return np.einsum("mij,mj->mi", u @ np.swapaxes(u, 1, 2), vectors)
    u = vec[..., :, :config.d]
    return vectors - np.einsum("mij,mj->mi", u @ np.swapaxes(u, 1, 2), vectors)


def attraction_force(config: ScmsConfig, state: ScmsState, x):
    """mu(x) for a single point; raises IsolatedPoint when the radius-based
    neighborhood of an mfit method contains no samples."""
    xb, _ = _as_batch(x, state.samples.shape[1])
    mu, _, isolated = _batch_parts(state, xb)
    if isolated[0]:
        raise IsolatedPoint(f"no samples within reach of {np.asarray(x)}")
    return mu[0]


def intermediate_matrix(config: ScmsConfig, state: ScmsState, x):
    """The symmetric matrix whose spectrum defines the step's projector."""
    xb, _ = _as_batch(x, state.samples.shape[1])
    _, mats, isolated = _batch_parts(state, xb)
    if isolated[0]:
        raise IsolatedPoint(f"no samples within reach of {np.asarray(x)}")
    return mats[0]


def _step_batch(state: ScmsState, x):
    """One lockstep update; returns (displacement, isolated mask)."""
    mu, mats, isolated = _batch_parts(state, x)
    disp = state.config.kappa * _normal_projected(state, mats, mu)
    disp[isolated] = 0.0
    return disp, isolated


def step(config: ScmsConfig, state: ScmsState, x):
    """x + kappa * Pi_perp mu(x) for a single point."""
    xb, _ = _as_batch(x, state.samples.shape[1])
    disp, isolated = _step_batch(state, xb)
    if isolated[0]:
        raise IsolatedPoint(f"no samples within reach of {np.asarray(x)}")
    return xb[0] + disp[0]


def _final_alignment(state: ScmsState, x):
    """Cosine of the attraction force against the estimated tangent space
    (1 = ridge-aligned); NaN where the force vanishes or the point is isolated."""
    config = state.config
    mu, mats, isolated = _batch_parts(state, x)
    dim = mats.shape[-1]
    _, vec = eigh_descending(mats)
    if config.method.is_mfit:
        tangent = vec[..., :, dim - config.d:]
    else:
        tangent = vec[..., :, :config.d]
    norms = np.linalg.norm(mu, axis=1)
    comp = np.einsum("mij,mi->mj", tangent, mu)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.linalg.norm(comp, axis=1) / norms
    s = np.where((norms == 0.0) | isolated, np.nan, np.minimum(s, 1.0))
    return s


def run(config: ScmsConfig, inputs, samples=None) -> ScmsResult:
    """Project every input point onto the estimated ridge.

    The inputs double as the sample cloud unless a separate ``samples`` cloud
    is given.  Points iterate independently (in lockstep) until their
    displacement is <= epsilon or ``max_iters`` is hit; isolated points (mfit
    neighborhoods with no samples) freeze in place and are flagged
    unconverged.  The run is deterministic given inputs + config.
    """
    state = build_state(config, inputs if samples is None else samples)
    if samples is None:
        x = state.samples.copy()
    else:
        x, _ = _as_batch(np.asarray(inputs.points if isinstance(inputs, PointCloud)
                                    else inputs, dtype=float), state.samples.shape[1])
        x = x.copy()
    n = x.shape[0]
    iterations = np.zeros(n, dtype=int)
    converged = np.zeros(n, dtype=bool)
    active = np.arange(n)
    for t in range(1, state.config.max_iters + 1):
        disp, isolated = _step_batch(state, x[active])
        x[active] += disp
        norms = np.linalg.norm(disp, axis=1)
        iterations[active] = t
        ok = (norms <= state.epsilon) & ~isolated
        converged[active[ok]] = True
        active = active[~(ok | isolated)]
        if active.size == 0:
            break
    final_align = _final_alignment(state, x)
    return ScmsResult(output=PointCloud(x), iterations=iterations,
                      converged=converged, final_align=final_align)
