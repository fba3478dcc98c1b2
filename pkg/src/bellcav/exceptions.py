"""Exception types raised by the numerical layers."""


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes; always a programming error."""


class SingularMatrixError(ArithmeticError):
    """LU pivot underflowed the configured singularity threshold."""


class SingularBlockError(SingularMatrixError):
    """A block of the partitioned inversion is numerically singular."""

    def __init__(self, block: str, message: str = ""):
        self.block = block
        super().__init__(message or f"singular block in partitioned inversion: {block}")


class NormOverflowError(ArithmeticError):
    """Matrix norm exceeds the configured bound for the exponential."""


class NonHermitianError(ValueError):
    """Input violated a Hermiticity precondition."""


class PoleError(ValueError):
    """Driving-modulation angle too close to a pole of f(theta)."""


class DegeneratePropagatorError(ArithmeticError):
    """A propagator denominator d_n is numerically zero."""


class IntegrationUnstableError(RuntimeError):
    """Trace drift exceeded the instability gate; reduce the step size."""


class NoStationaryStateError(RuntimeError):
    """Liouvillian nullspace is empty at the configured tolerance."""
