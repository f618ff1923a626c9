"""Shared numerical oracles for the test suite.

The finite-difference helpers are written from the textbook definitions and
stay independent of any derivative code inside the package; tests freeze
their outputs as the expected values.
"""

import numpy as np


def fd_gradient(f, x, step=None):
    """Central-difference gradient of a scalar function at x."""
    x = np.asarray(x, dtype=float)
    if step is None:
        step = 1e-5 * (1.0 + np.linalg.norm(x))
    grad = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        grad[i] = (f(x + e) - f(x - e)) / (2.0 * step)
    return grad


def fd_hessian(f, x, step=None):
    """Central-difference Hessian (4-point mixed partials), symmetrized."""
    x = np.asarray(x, dtype=float)
    if step is None:
        step = 1e-4 * (1.0 + np.linalg.norm(x))
    dim = x.size
    hess = np.zeros((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            ei = np.zeros_like(x)
            ej = np.zeros_like(x)
            ei[i] = step
            ej[j] = step
            hess[i, j] = (f(x + ei + ej) - f(x + ei - ej)
                          - f(x - ei + ej) + f(x - ei - ej)) / (4.0 * step * step)
            hess[j, i] = hess[i, j]
    return hess


def rel_err(actual, expected):
    """Frobenius-relative error with a floor to avoid 0/0."""
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    scale = max(np.linalg.norm(expected), 1e-300)
    return np.linalg.norm(actual - expected) / scale
