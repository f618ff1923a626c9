"""Exception types shared across the package."""


class RidgeKitError(Exception):
    """Base class for all ridgekit errors."""


class InvalidInput(RidgeKitError, ValueError):
    """Malformed or out-of-contract input (non-finite entries, bad sizes, bad ranks)."""


class DomainError(RidgeKitError, ValueError):
    """Argument outside the mathematical domain of an operation (e.g. y <= 0 for y^q/q)."""


class ZeroGradient(RidgeKitError, ArithmeticError):
    """Cosine alignment requested at a point with vanishing gradient."""


class DegenerateProjection(RidgeKitError, ValueError):
    """Projection onto a manifold is not unique (e.g. the center of a circle)."""


class IsolatedPoint(RidgeKitError, RuntimeError):
    """A radius-based neighborhood contains no samples; the point cannot be moved."""
