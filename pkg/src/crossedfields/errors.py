"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """An iterative or algebraic routine failed to produce a usable result."""


class InsufficientDataError(ValueError):
    """Not enough levels or spacings for a statistically meaningful answer."""


class DegenerateFrameError(ValueError):
    """A quantization axis is undefined because the defining vector vanishes."""


class UnsupportedConfigurationError(ValueError):
    """The requested parameter combination lies outside a formula's domain."""
