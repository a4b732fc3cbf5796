"""Exception types shared across the toolkit.

Every failed precondition raises a subclass of :class:`PreconditionFailed`
carrying the name of the violated condition, so callers (and the CLI) can
report which gate failed without parsing message strings.
"""


class StereoUnfoldError(Exception):
    """Base class for all package errors."""


class PreconditionFailed(StereoUnfoldError):
    """A documented precondition of an operation was violated.

    Attributes
    ----------
    condition : str
        Short machine-readable name of the failed condition.
    """

    condition = "precondition"

    def __init__(self, message, condition=None):
        super().__init__(message)
        if condition is not None:
            self.condition = condition


class StripViolation(PreconditionFailed):
    condition = "re_s_in_strip"


class ContourOutsideStrip(PreconditionFailed):
    condition = "mu_in_strip"


class NotIntegrableOnLine(PreconditionFailed):
    condition = "line_integrability"


class NonIntegrableQuotient(PreconditionFailed):
    condition = "quotient_vanishes_at_infinity"


class SupportExceedsKernel(PreconditionFailed):
    condition = "support_within_kernel"


class NonSmoothInput(PreconditionFailed):
    condition = "input_smoothness"


class NonNormalizableH(PreconditionFailed):
    condition = "normalizable_size_distribution"


class WeightingDiverges(PreconditionFailed):
    condition = "size_weighting_integrable"


class QuadratureFailure(StereoUnfoldError):
    """Requested quadrature tolerance could not be reached."""


class EmptyHistogram(StereoUnfoldError):
    """Histogram contains no counts."""


class NegativeCount(StereoUnfoldError):
    """Histogram contains a negative count."""


class InvalidShapeParameters(StereoUnfoldError):
    """Shape kernel parameters outside their admissible range."""


class ZeroMellinImage(StereoUnfoldError):
    """Kernel image vanishes at the requested point."""
