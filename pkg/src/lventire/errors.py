"""Exception types raised across the package."""


class LVError(Exception):
    """Base class for all package errors."""


class DegenerateRegime(LVError):
    """Competition coefficients sit on a regime boundary (k1 = 1, k2 = 1 or k1*k2 = 1)."""


class AssumptionViolated(LVError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class SubminimalSpeed(LVError):
    """Requested wave speed is below the minimal admissible speed."""


class SignSplitViolation(LVError):
    """Coexistence linearization failed to split into two stable and two unstable roots."""


class HomotopyBreak(LVError):
    def __init__(self, message, rho=None):
        super().__init__(message)
        self.rho = rho


class AmbiguousMultiplicity(LVError):
    """Eigenvalues coincide numerically but the parameter predicates disagree."""


class NotAnEigenvalue(LVError):
    pass


class NoConvergence(LVError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class MonotonicityLost(LVError):
    pass


class WindowTooNarrow(LVError):
    pass


class PoorFit(LVError):
    def __init__(self, message, r_squared=None):
        super().__init__(message)
        self.r_squared = r_squared


class BoundViolated(LVError):
    def __init__(self, message, xi=None):
        super().__init__(message)
        self.xi = xi


class InitialDataOutOfBox(LVError):
    pass


class Blowup(LVError):
    pass


class EnvelopeViolated(LVError):
    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SelectorAllZero(LVError):
    pass


class DomainExceeded(LVError):
    pass


class InequalityViolated(LVError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class StepRejectedFloor(LVError):
    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class SandwichViolated(LVError):
    def __init__(self, message, x=None, t=None, margin=None):
        super().__init__(message)
        self.x = x
        self.t = t
        self.margin = margin


class NoConvergenceTrend(LVError):
    def __init__(self, message, gaps=None):
        super().__init__(message)
        self.gaps = gaps


class PropertyFailed(LVError):
    def __init__(self, message, index=None, value=None):
        super().__init__(message)
        self.index = index
        self.value = value


class UnboundedGrowth(LVError):
    pass


class MissingArtifact(LVError):
    pass
