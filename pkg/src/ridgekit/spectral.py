"""Symmetric eigendecomposition with deterministic conventions, spectral
projectors, and numerical checkers for two rank-one-modification facts:

* adding ``lam * u u^T`` (lam >= 0) to a symmetric matrix biases its leading
  d-dimensional eigenspace towards u, i.e. ``||Pi_A u|| >= ||Pi_B u||``;
* if u already lies in the span of the leading d eigenvectors, the trailing
  D - d eigenvalues are unchanged.

Eigenvalues are reported in non-increasing order.  Eigenvector signs follow a
fixed convention (entry of largest magnitude made positive, lowest index on
ties) so that repeated runs and basis comparisons are reproducible.  Subspace
comparisons should always go through projector matrices, never raw bases,
because eigenbases are not unique under degeneracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInput

#: absolute tolerance on ||M - M^T|| entries before a matrix is rejected
SYMMETRY_ATOL = 1e-12


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalues in non-increasing order; column k of ``vectors`` pairs with
    ``values[k]``."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


@dataclass(frozen=True)
class Projector:
    """Symmetric idempotent matrix projecting onto a rank-d eigenspace.

    ``gap`` is the spectral gap between the last eigenvalue kept and the first
    one dropped; a zero gap means the subspace was not uniquely determined and
    callers may want to reject the point.
    """

    matrix: np.ndarray
    rank: int
    gap: float = np.inf

    @property
    def residual(self) -> np.ndarray:
        """The complementary projector I - P."""
        return np.eye(self.matrix.shape[0]) - self.matrix


def _apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive.

    np.argmax picks the lowest index among ties, which fixes the convention.
    """
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sym_eig(matrix: np.ndarray) -> EigenPair:
    """Eigendecompose a symmetric matrix into a deterministic :class:`EigenPair`.

    The input is symmetrized as (M + M^T)/2 before factorization; asymmetry
    beyond ``SYMMETRY_ATOL`` or any non-finite entry raises
    :class:`InvalidInput`.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix contains non-finite entries")
    if np.max(np.abs(m - m.T), initial=0.0) > SYMMETRY_ATOL:
        raise InvalidInput("matrix is not symmetric within tolerance")
    sym = (m + m.T) / 2.0
    values, vectors = np.linalg.eigh(sym)  # ascending
    values = values[::-1]
    vectors = _apply_sign_convention(vectors[:, ::-1])
    return EigenPair(values=values, vectors=vectors)


def top_projector(matrix: np.ndarray, d: int) -> Projector:
    """Projector onto the span of the leading ``d`` eigenvectors of ``matrix``.

    ``d`` may be 0 (zero matrix) or D (identity).  The reported ``gap`` is
    ``values[d-1] - values[d]`` where both exist, else +inf.
    """
    pair = sym_eig(matrix)
    dim = pair.dim
    if not 0 <= d <= dim:
        raise InvalidInput(f"rank d={d} out of range for a {dim}x{dim} matrix")
    basis = pair.vectors[:, :d]
    gap = np.inf
    if 0 < d < dim:
        gap = float(pair.values[d - 1] - pair.values[d])
    return Projector(matrix=basis @ basis.T, rank=d, gap=gap)


def check_rank_one_bias(B: np.ndarray, u: np.ndarray, lam: float, d: int):
    """Evaluate ``||Pi_A u||`` vs ``||Pi_B u||`` for ``A = B + lam * u u^T``.

    Returns ``(lhs, rhs, holds)`` with ``holds = lhs >= rhs - 1e-10``.
    Requires ``lam >= 0``; the bias direction flips otherwise.
    """
    if lam < 0:
        raise InvalidInput(f"lam must be non-negative, got {lam}")
    u = np.asarray(u, dtype=float)
    A = np.asarray(B, dtype=float) + lam * np.outer(u, u)
    lhs = float(np.linalg.norm(top_projector(A, d).matrix @ u))
    rhs = float(np.linalg.norm(top_projector(B, d).matrix @ u))
    return lhs, rhs, lhs >= rhs - 1e-10


def check_tail_spectrum_preserved(B: np.ndarray, alpha: np.ndarray, lam: float, d: int,
                                  atol: float = 1e-9) -> bool:
    """True iff eigenvalues d+1..D agree between B and ``B + lam * u u^T``
    where ``u = U_d @ alpha`` is constructed inside the leading-d eigenspace.

    The in-span construction guarantees preservation for ``lam >= 0``; a u
    chosen outside the span generally breaks it.
    """
    if lam < 0:
        raise InvalidInput(f"lam must be non-negative, got {lam}")
    alpha = np.asarray(alpha, dtype=float)
    pair = sym_eig(B)
    if alpha.shape != (d,):
        raise InvalidInput(f"alpha must have length d={d}, got shape {alpha.shape}")
    u = pair.vectors[:, :d] @ alpha
    A = np.asarray(B, dtype=float) + lam * np.outer(u, u)
    tail_a = sym_eig(A).values[d:]
    tail_b = pair.values[d:]
    return bool(np.all(np.abs(tail_a - tail_b) <= atol))


def eigh_descending(matrices: np.ndarray):
    """Batched symmetric eigendecomposition in non-increasing order.

    Accepts (..., D, D) and returns (values (..., D), vectors (..., D, D)).
    No sign convention is applied: batch consumers compare projectors, which
    are sign-invariant.
    """
    values, vectors = np.linalg.eigh(matrices)
    return values[..., ::-1], vectors[..., :, ::-1]
