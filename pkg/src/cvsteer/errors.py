"""Exception types raised across the package."""


class SteeringError(Exception):
    """Base class for all cvsteer errors."""


class NotSymmetric(SteeringError):
    """Input matrix is not symmetric within tolerance."""


class UnphysicalState(SteeringError):
    """Covariance matrix violates the uncertainty-principle constraint.

    Carries ``min_eigenvalue``, the most negative eigenvalue of the
    Hermitian matrix sigma + i*Omega.
    """

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NotPositiveDefinite(SteeringError):
    """Matrix expected to be symmetric positive definite is not."""


class SingularParams(SteeringError):
    """Symplectic parametrization hit its singular set (u*v = 1 or w = 0)."""


class DegenerateCorrelation(SteeringError):
    """Correlation block structure degenerates (e.g. a*b = c2**2)."""


class SingularBlock(SteeringError):
    """A 2x2 block that must be inverted is numerically singular."""


class SingularMarginal(SteeringError):
    """A marginal variance needed as a denominator is not positive."""


class NoConvergence(SteeringError):
    """Optimizer failed to converge; carries the best result found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DegenerateVariance(SteeringError):
    """Sample variance of the conditioning variable vanishes."""


class InsufficientSamples(SteeringError):
    """Not enough samples (or bins) for the requested estimator."""


class UnphysicalMixture(SteeringError):
    """Mixture second moments fail the physicality check."""
