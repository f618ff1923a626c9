"""The power family of increasing concave maps and composed derivatives.

``PowerTransform(q)`` represents y -> y^q / q on positive reals for
q in (-inf, 1], with q = 0 meaning the natural logarithm (the q -> 0 limit).
Every member is strictly increasing (f' = y^(q-1) > 0) and concave
(f'' = (q-1) y^(q-2) <= 0, strictly for q < 1).

Composed quantities for a density model p are formed from scale-free
ingredients (log p, grad log p, hess log p) so that extreme exponents never
overflow before ratios are taken:

    grad(f o p)  = e^(q log p) * grad log p
    hess(f o p)  = e^(q log p) * M(x)
    M(x)         = hess log p + q * (grad log p)(grad log p)^T

``M`` (the scaled modified Hessian ``hess_p_f / p``) carries the entire ridge
geometry: it shares eigenvectors and eigenvalue signs with hess(f o p).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

#: |q| below this snaps to the logarithm branch; y^q/q is unusable near q = 0
_LOG_SNAP = 1e-12


def _require_positive(y):
    arr = np.asarray(y, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("power transforms are defined for y > 0 only")
    return arr


@dataclass(frozen=True)
class PowerTransform:
    """Selects f(y) = y^q/q for q != 0 and f(y) = ln y for q = 0."""

    q: float

    def __post_init__(self):
        if not np.isfinite(self.q) or self.q > 1:
            raise DomainError(f"q must be a finite real <= 1, got {self.q}")
        if abs(self.q) < _LOG_SNAP:
            object.__setattr__(self, "q", 0.0)

    @property
    def is_log(self) -> bool:
        return self.q == 0.0

    def apply(self, y):
        y = _require_positive(y)
        if self.is_log:
            return np.log(y)
        return y ** self.q / self.q

    def deriv1(self, y):
        """f'(y) = y^(q-1); covers the log branch too (1/y)."""
        return _require_positive(y) ** (self.q - 1.0)

    def deriv2(self, y):
        """f''(y) = (q-1) y^(q-2), non-positive on y > 0."""
        return (self.q - 1.0) * _require_positive(y) ** (self.q - 2.0)


def modified_hessian_scaled(model, t: PowerTransform, x) -> np.ndarray:
    """M(x) = hess log p + q * g g^T with g = grad log p.

    Equal to hess_p_f(x) / p(x): same eigenvectors, eigenvalue order, and
    eigenvalue signs as the composed Hessian, but immune to p^q overflow.
    Batched: accepts (..., D) points.
    """
    g = model.grad_log(x)
    return model.hess_log(x) + t.q * (g[..., :, None] * g[..., None, :])


def composed_grad(model, t: PowerTransform, x) -> np.ndarray:
    """Gradient of f o p at x, computed as e^(q log p) * grad log p."""
    scale = np.exp(t.q * model.logp(x))
    return scale[..., None] * model.grad_log(x)


def modified_hessian(model, t: PowerTransform, x) -> np.ndarray:
    """hess_p_f(x) = hess p + (f''/f')(p) grad p grad p^T, computed as p * M(x)."""
    scale = np.exp(model.logp(x))
    return scale[..., None, None] * modified_hessian_scaled(model, t, x)


def composed_hess(model, t: PowerTransform, x) -> np.ndarray:
    """Hessian of f o p at x: f'(p) * hess_p_f = e^(q log p) * M(x)."""
    scale = np.exp(t.q * model.logp(x))
    return scale[..., None, None] * modified_hessian_scaled(model, t, x)


def reparam_check(q1: float, q2: float, y: float):
    """First two derivatives of the map g sending f_q2(y) to f_q1(y).

    For q1 <= q2 <= 1 and y > 0:  g'(z) = y^(q1-q2) > 0 and
    g''(z) = (q1-q2) y^(q1-2*q2) <= 0, i.e. g is increasing and concave.
    Returns (g1, g2).
    """
    if not q1 <= q2 <= 1:
        raise DomainError(f"expected q1 <= q2 <= 1, got q1={q1}, q2={q2}")
    y = float(_require_positive(y))
    g1 = y ** (q1 - q2)
    g2 = (q1 - q2) * y ** (q1 - 2.0 * q2)
    return g1, g2
