"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A model or algorithm parameter lies outside its domain."""


class UnsupportedMomentError(ValueError):
    """Requested moment order is not tabulated."""


class InstanceTooLargeError(ValueError):
    """Brute-force enumeration would exceed the configured budget."""


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before reaching its tolerance.

    The best iterate found is kept on the exception so callers can decide
    whether it is good enough.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConfigError(ValueError):
    """Experiment configuration failed validation."""
