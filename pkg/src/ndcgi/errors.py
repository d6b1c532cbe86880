"""Exception hierarchy for the ndcgi package."""


class NdcgiError(Exception):
    """Base class for all package-specific errors."""


class InvalidFieldError(NdcgiError):
    """A sampled field violates its structural invariants (shape, finiteness)."""


class InvalidParamsError(NdcgiError):
    """A parameter object violates its invariants."""


class ShapeMismatchError(NdcgiError):
    """Two grid-sampled objects that must share a grid do not."""


class SamplingCriterionError(NdcgiError):
    """Requested propagation distance violates the band-limit sampling rule."""


class ResolutionError(NdcgiError):
    """A random screen's coherence scale is unresolvable on the grid."""


class NonConvergentError(NdcgiError):
    """A Gaussian-integral coefficient has nonpositive real part."""


class DegenerateWidthError(NdcgiError):
    """Kernel coefficients sum to zero; no width is defined."""


class InsufficientSamplesError(NdcgiError):
    """An ensemble estimator was given too few samples."""


class WidthEstimateError(NdcgiError):
    """Gaussian width fit failed or the image SNR is too low to fit."""


class ConfigError(NdcgiError):
    """A run configuration file is missing, malformed, or inconsistent."""
