"""Density models exposing p, grad p, and hess p, plus log-domain ratios.

Three models share one interface:

* :class:`KdeModel` -- the Gaussian-kernel estimate
  p(x) = (1/(n h^D)) sum_i exp(-||x - x_i||^2 / h^2) built on a sample cloud
  (note the kernel convention exp(-r^2/h^2), no 1/2 factor);
* :class:`UnimodalModel` -- p(x) = exp(-x1^2 - 2 x2^2);
* :class:`BimodalModel` -- p(x) = exp(-(x1+a)^2 - 2 x2^2) + exp(-(x1-a)^2 - 2 x2^2).

Each model evaluates ``logp``, ``grad_log`` (= grad p / p) and ``hess_log``
(the Hessian of log p) for a single point ``(D,)`` or a batch ``(m, D)``.
Everything is computed in the log domain, so far-field points never underflow
into zeros before ratios are formed.  ``eval_p`` itself may underflow to 0.0
at extreme points; robust consumers work from ``logp`` and the ratios.

Useful identities (all verified in the test suite by finite differences):

    grad p = p * grad_log              hess p = p * (hess_log + g g^T)
    KDE:  grad_log = (2/h^2) (c(x) - x)   with c(x) the kernel-weighted center
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .cloud import PointCloud
from .exceptions import InvalidInput


def _as_batch(x, dim):
    """Return (points (m, D), single_flag). Accepts (D,) or (m, D)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
        single = True
    elif arr.ndim == 2:
        single = False
    else:
        raise InvalidInput(f"expected a point (D,) or batch (m, D), got shape {arr.shape}")
    if arr.shape[1] != dim:
        raise InvalidInput(f"point dimension {arr.shape[1]} != model dimension {dim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("evaluation points must be finite")
    return arr, single


def _unbatch(value, single):
    return value[0] if single else value


class DensityModel:
    """Interface shared by all density models; see the module docstring."""

    dim: int

    def logp(self, x):
        raise NotImplementedError

    def grad_log(self, x):
        raise NotImplementedError

    def hess_log(self, x):
        raise NotImplementedError


class KdeModel(DensityModel):
    """Gaussian kernel density estimate over a fixed sample cloud.

    Parameters
    ----------
    samples : PointCloud or (n, D) array
        At least one finite sample.
    bandwidth : float
        Kernel length scale h > 0 (same units as the ambient space).
    """

    #: cap on the per-block (rows x samples x dim) workspace, in elements
    _BLOCK_ELEMS = 2 ** 24

    def __init__(self, samples, bandwidth: float):
        if isinstance(samples, PointCloud):
            pts = samples.points
        else:
            pts = np.asarray(samples, dtype=float)
            if pts.ndim == 1:
                pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise InvalidInput(f"need an (n, D) sample array with n >= 1, got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidInput("samples must be finite")
        if not bandwidth > 0:
            raise InvalidInput(f"bandwidth must be positive, got {bandwidth}")
        self.samples = pts
        self.bandwidth = float(bandwidth)
        self.dim = pts.shape[1]
        self.n = pts.shape[0]

    def _block_rows(self):
        per_row = max(self.n * self.dim, 1)
        return max(1, self._BLOCK_ELEMS // per_row)

    def _logits(self, x):
        """(m, n) array of -||x - x_i||^2 / h^2."""
        diff = x[:, None, :] - self.samples[None, :, :]
        return -np.einsum("mnd,mnd->mn", diff, diff) / self.bandwidth ** 2

    def weights(self, x):
        """Normalized kernel weights w(x, x_i); rows sum to one.

        Computed as a log-domain softmax (max logit subtracted) so that even
        far-field points keep a valid, normalized weight vector.
        """
        x, single = _as_batch(x, self.dim)
        out = np.empty((x.shape[0], self.n))
        step = self._block_rows()
        for lo in range(0, x.shape[0], step):
            logits = self._logits(x[lo:lo + step])
            logits -= logits.max(axis=1, keepdims=True)
            w = np.exp(logits)
            out[lo:lo + step] = w / w.sum(axis=1, keepdims=True)
        return _unbatch(out, single)

    def local_moments(self, x, k: int | None = None):
        """Kernel-weighted center and scatter about x.

        Returns ``(weights, center, scatter)`` where
        ``center = sum_i w_i x_i`` and
        ``scatter = sum_i w_i (x_i - x)(x_i - x)^T``.

        With ``k`` given, the weights are renormalized over the k nearest
        samples only (Euclidean, ties broken by sample index) and all other
        weights are zero.
        """
        x, single = _as_batch(x, self.dim)
        m = x.shape[0]
        weights = np.zeros((m, self.n))
        center = np.empty((m, self.dim))
        scatter = np.empty((m, self.dim, self.dim))
        step = self._block_rows()
        for lo in range(0, m, step):
            xb = x[lo:lo + step]
            diff = self.samples[None, :, :] - xb[:, None, :]
            logits = -np.einsum("mnd,mnd->mn", diff, diff) / self.bandwidth ** 2
            if k is not None:
                if not 1 <= k <= self.n:
                    raise InvalidInput(f"neighbor count k={k} outside 1..{self.n}")
                order = np.argsort(-logits, axis=1, kind="stable")[:, :k]
                order.sort(axis=1)  # ascending sample index: k = n matches the full path exactly
                rows = np.arange(xb.shape[0])[:, None]
                sel_logits = logits[rows, order]
                sel_logits -= sel_logits.max(axis=1, keepdims=True)
                wsel = np.exp(sel_logits)
                wsel /= wsel.sum(axis=1, keepdims=True)
                wb = np.zeros_like(logits)
                wb[rows, order] = wsel
            else:
                logits -= logits.max(axis=1, keepdims=True)
                wb = np.exp(logits)
                wb /= wb.sum(axis=1, keepdims=True)
            weights[lo:lo + step] = wb
            center[lo:lo + step] = wb @ self.samples
            scatter[lo:lo + step] = np.einsum("mn,mni,mnj->mij", wb, diff, diff)
        if single:
            return weights[0], center[0], scatter[0]
        return weights, center, scatter

    def center(self, x):
        """Kernel-weighted center c(x) = sum_i w(x, x_i) x_i."""
        w = self.weights(x)
        return w @ self.samples

    def logp(self, x):
        x, single = _as_batch(x, self.dim)
        out = np.empty(x.shape[0])
        step = self._block_rows()
        norm = np.log(self.n) + self.dim * np.log(self.bandwidth)
        for lo in range(0, x.shape[0], step):
            logits = self._logits(x[lo:lo + step])
            top = logits.max(axis=1)
            out[lo:lo + step] = top + np.log(np.exp(logits - top[:, None]).sum(axis=1)) - norm
        return _unbatch(out, single)

    def grad_log(self, x):
        xb, single = _as_batch(x, self.dim)
        c = self.center(xb)
        return _unbatch((2.0 / self.bandwidth ** 2) * (c - xb), single)

    def hess_log(self, x):
        xb, single = _as_batch(x, self.dim)
        _, c, s2 = self.local_moments(xb)
        r = c - xb
        h2 = self.bandwidth ** 2
        out = (4.0 / h2 ** 2) * (s2 - r[:, :, None] * r[:, None, :])
        out -= (2.0 / h2) * np.eye(self.dim)
        return _unbatch(out, single)


class UnimodalModel(DensityModel):
    """p(x) = exp(-x1^2 - 2 x2^2) on R^2; maximum 1 at the origin."""

    dim = 2
    _curv = np.array([2.0, 4.0])  # -hess of log p, diagonal

    def logp(self, x):
        x, single = _as_batch(x, self.dim)
        return _unbatch(-(x[:, 0] ** 2) - 2.0 * x[:, 1] ** 2, single)

    def grad_log(self, x):
        x, single = _as_batch(x, self.dim)
        return _unbatch(-self._curv * x, single)

    def hess_log(self, x):
        x, single = _as_batch(x, self.dim)
        out = np.broadcast_to(np.diag(-self._curv), (x.shape[0], 2, 2)).copy()
        return _unbatch(out, single)


@dataclass(frozen=True)
class BimodalModel(DensityModel):
    """Two-bump density exp(-(x1+a)^2 - 2 x2^2) + exp(-(x1-a)^2 - 2 x2^2).

    The log-density gradient is -2 [x1 + a*delta(x1), 2 x2] where
    delta(x1) = (p1 - p2)/p = -tanh(2 a x1), and its Hessian is diagonal:
    diag(-2 + 4 a^2 (1 - delta^2), -4).  Both facts follow from p1/p2 =
    exp(-4 a x1) and are finite-difference checked in the tests.
    """

    a: float
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a >= 0):
            raise InvalidInput(f"mode separation a must be >= 0, got {self.a}")

    def delta(self, x1):
        """delta*(x1) = (p1 - p2)/p, a function of x1 alone, in [-1, 1]."""
        return -np.tanh(2.0 * self.a * np.asarray(x1, dtype=float))

    def logp(self, x):
        x, single = _as_batch(x, self.dim)
        e1 = -((x[:, 0] + self.a) ** 2) - 2.0 * x[:, 1] ** 2
        e2 = -((x[:, 0] - self.a) ** 2) - 2.0 * x[:, 1] ** 2
        return _unbatch(np.logaddexp(e1, e2), single)

    def grad_log(self, x):
        x, single = _as_batch(x, self.dim)
        d = self.delta(x[:, 0])
        g = np.stack([-2.0 * (x[:, 0] + self.a * d), -4.0 * x[:, 1]], axis=1)
        return _unbatch(g, single)

    def hess_log(self, x):
        x, single = _as_batch(x, self.dim)
        d = self.delta(x[:, 0])
        out = np.zeros((x.shape[0], 2, 2))
        out[:, 0, 0] = -2.0 + 4.0 * self.a ** 2 * (1.0 - d ** 2)
        out[:, 1, 1] = -4.0
        return _unbatch(out, single)

    def axis_roots(self, xtol: float = 1e-12):
        """All solutions of x1 + a*delta(x1) = 0 on [-a-1, a+1], ascending.

        x1 = 0 is always a root; side roots appear once 2 a^2 > 1.  Roots are
        located by bisection on sign-change subintervals of a fine scan grid.
        """
        if self.a == 0:
            return np.array([0.0])
        lo, hi = -self.a - 1.0, self.a + 1.0
        grid = np.linspace(lo, hi, 4097)
        vals = grid + self.a * self.delta(grid)
        roots = [g for g, v in zip(grid, vals) if v == 0.0]
        for i in range(len(grid) - 1):
            if vals[i] * vals[i + 1] < 0:
                roots.append(brentq(lambda t: t + self.a * self.delta(t),
                                    grid[i], grid[i + 1], xtol=xtol))
        roots = sorted(roots)
        dedup = [roots[0]]
        for r in roots[1:]:
            if r - dedup[-1] > 1e-9:
                dedup.append(r)
        return np.array(dedup)


def kde_weights(model: KdeModel, x):
    """Normalized kernel weights of ``model`` at ``x`` (see KdeModel.weights)."""
    return model.weights(x)


def weighted_center(model: KdeModel, x):
    """Kernel-weighted center c(x); a convex combination of the samples."""
    return model.center(x)


def eval_p(model: DensityModel, x):
    """Density value p(x) = exp(logp); may underflow to 0.0 at extreme x."""
    return np.exp(model.logp(x))


def eval_grad(model: DensityModel, x):
    """Gradient of p at x."""
    logp = model.logp(x)
    return np.exp(logp)[..., None] * model.grad_log(x)


def eval_hess(model: DensityModel, x):
    """Hessian of p at x (symmetric)."""
    g = model.grad_log(x)
    ggt = g[..., :, None] * g[..., None, :]
    return np.exp(model.logp(x))[..., None, None] * (model.hess_log(x) + ggt)
