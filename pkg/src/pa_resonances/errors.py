"""Exception hierarchy shared by all modules."""


class ResonanceError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ResonanceError):
    """Input data is malformed or violates a documented precondition."""


class ParseError(ValidationError):
    pass


class NotAPermutation(ValidationError):
    pass


class DisconnectedSurface(ValidationError):
    pass


class NotAnAutomorphism(ValidationError):
    """The requested affine map does not exist for the given anchor."""


class NotFound(ValidationError):
    """No anchor realizes the matrix as an affine automorphism."""


class BranchBudgetExceeded(ResonanceError):
    pass


class DivisionFailure(ResonanceError):
    """An exact polynomial division that must succeed left a remainder."""


class BasisError(ResonanceError):
    pass


class ClusterAmbiguity(ResonanceError):
    pass


class PremiseViolation(ValidationError):
    pass


class TailBoundTooLarge(ResonanceError):
    pass


class HitVertex(ResonanceError):
    pass


class HitSingularity(ResonanceError):
    """A flow line reached a cone point before the requested time."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class DegenerateDisplacement(ResonanceError):
    pass


class UnstableWinding(ResonanceError):
    pass


class NoiseFloor(ResonanceError):
    pass


class UnreachableBothDirections(ResonanceError):
    pass


class VerificationFailure(ResonanceError):
    """A mathematical identity checked by the CLI did not hold."""
