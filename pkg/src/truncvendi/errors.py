"""Exception hierarchy.

Everything raised on purpose by this package derives from :class:`VendiError`.
Input problems derive from :class:`ValidationError` (CLI exit code 2);
numerical breakdowns derive from :class:`ComputationError` (exit code 3).
"""


class VendiError(Exception):
    """Base class for all package errors."""


class ValidationError(VendiError, ValueError):
    """Inputs violate a documented precondition."""


class ComputationError(VendiError, ArithmeticError):
    """A numerical routine failed on otherwise valid inputs."""


class InvalidParams(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ZeroNormVector(ValidationError):
    pass


class NonFiniteValue(ValidationError):
    pass


class InvalidAlpha(ValidationError):
    pass


class NotAProbability(ValidationError):
    pass


class InfiniteDimensionalKernel(ValidationError):
    """The kernel has no finite-dimensional feature map (Gaussian)."""


class ShiftInvariantRequired(ValidationError):
    """Random Fourier features need a shift-invariant kernel."""


class PreconditionViolated(ValidationError):
    """A bound was requested outside the regime where it is proven."""


class BadMagic(ValidationError):
    pass


class PayloadSizeMismatch(ValidationError):
    pass


class TruncatedPayload(PayloadSizeMismatch):
    pass


class RaggedRows(ValidationError):
    pass


class GridExceedsData(ValidationError):
    pass


class NotPSD(ComputationError):
    pass


class EigensolverFailure(ComputationError):
    pass


class DegenerateLandmarks(ComputationError):
    pass


class IoFailure(VendiError, OSError):
    pass
