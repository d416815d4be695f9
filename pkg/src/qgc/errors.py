"""Exception hierarchy shared by every qgc module."""


class QGCError(ValueError):
    """Base class for all validation and numerical errors raised by qgc."""


class DimensionMismatchError(QGCError):
    pass


class NotHermitianError(QGCError):
    pass


class EigenSolverError(QGCError):
    """Raised when the Hermitian eigensolver fails to converge.

    Carries the matrix dimension and a condition estimate for diagnostics.
    """

    def __init__(self, message: str, dim: int, condition: float):
        super().__init__(f"{message} (dim={dim}, cond~{condition:.3g})")
        self.dim = dim
        self.condition = condition


class NormalizationError(QGCError):
    pass


class InvalidStateError(QGCError):
    pass


class InvalidBlochVectorError(InvalidStateError):
    pass


class InvalidEffectError(QGCError):
    pass


class InvalidPOVMError(QGCError):
    pass


class NotSharpError(InvalidEffectError):
    pass


class IncompatibleFamilyError(QGCError):
    """A granule family that was required to commute does not."""

    def __init__(self, worst_pair: tuple[int, int], commutator_norm: float):
        i, j = worst_pair
        super().__init__(
            f"effects {i} and {j} do not commute (commutator norm {commutator_norm:.3e})"
        )
        self.worst_pair = worst_pair
        self.commutator_norm = commutator_norm


class ZeroProbabilityBranchError(QGCError):
    def __init__(self, index: int, probability: float):
        super().__init__(
            f"outcome {index} has probability {probability:.3e}; cannot condition on it"
        )
        self.index = index
        self.probability = probability


class InvalidChannelError(QGCError):
    pass


class InvalidParameterError(QGCError):
    pass


class EncodingError(QGCError):
    pass


class TrainingError(QGCError):
    pass


class ConfigError(QGCError):
    pass
