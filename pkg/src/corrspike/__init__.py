"""Detection and recovery of correlated spikes in paired random matrices."""
from .errors import (ConfigError, ConvergenceError, InstanceTooLargeError, ParameterError,
                     UnsupportedMomentError)
from .models import ModelParams, WignerPair, WishartPair
from .prior import PriorKind, PriorSpec, RhoMode, SpikePair

__all__ = [
    "ConfigError", "ConvergenceError", "InstanceTooLargeError", "ParameterError",
    "UnsupportedMomentError", "ModelParams", "WignerPair", "WishartPair", "PriorKind",
    "PriorSpec", "RhoMode", "SpikePair",
]
__version__ = "0.1.0"
