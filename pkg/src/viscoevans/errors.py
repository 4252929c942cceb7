"""Exception hierarchy shared by every layer of the package."""


class ViscoEvansError(Exception):
    """Base class for all package errors."""


class ContractViolation(ViscoEvansError, ValueError):
    """An argument breaks a documented precondition (shape, variant, equilibrium...)."""


class DomainError(ViscoEvansError, ValueError):
    """An argument lies outside the region where a formula is defined (e.g. a3 <= 0)."""


class ConnectionNotFound(ViscoEvansError):
    """Shooting failed to connect the requested endstates.

    ``miss_distance`` holds the smallest distance between the shot orbit and
    the target endstate, ``diagnostics`` any extra context.
    """

    def __init__(self, message, miss_distance=float("nan"), diagnostics=None):
        super().__init__(message)
        self.miss_distance = float(miss_distance)
        self.diagnostics = dict(diagnostics or {})


class SplittingDegenerate(ViscoEvansError):
    """A limiting matrix has an eigenvalue too close to the imaginary axis."""


class ProjectorFailure(ViscoEvansError):
    """The left/right basis product used to build a spectral projector is singular."""


class StiffFailure(ViscoEvansError):
    """Adaptive step size collapsed during frame integration."""

    def __init__(self, message, z=float("nan")):
        super().__init__(message)
        self.z = float(z)


class FitFailure(ViscoEvansError):
    """The large-|lambda| asymptotic fit could not be formed."""


class ConsistencyError(ViscoEvansError):
    """Two independent evaluation routes disagree beyond tolerance."""
