"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument lies outside the domain where a kernel or drift is defined."""


class InvalidGeometryError(ValueError):
    """Geometric input violates a structural hypothesis (e.g. qk with m < 2)."""


class SolverError(RuntimeError):
    """Base class for numerical failures of the eigenvalue and flow solvers."""


class NoBracketError(SolverError):
    pass


class StiffnessError(SolverError):
    pass


class ExtrapolationError(SolverError):
    """Richardson extrapolation did not contract under refinement."""


class DisagreementError(SolverError):
    """Shooting and finite-difference eigenvalues disagree beyond tolerance."""

    def __init__(self, message, shooting=None, fd=None):
        super().__init__(message)
        self.shooting = shooting
        self.fd = fd


class CoefficientBlowupError(SolverError):
    pass


class CertificateError(ValueError):
    """A proposed supersolution path failed its residual certificate."""
