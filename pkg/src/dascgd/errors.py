"""Exception types shared across the package."""


class DascgdError(Exception):
    """Base class for all package errors."""


class ConfigurationError(DascgdError, ValueError):
    """Invalid parameter value or inconsistent run configuration."""


class DimensionError(DascgdError, ValueError):
    """Array argument has the wrong shape or length."""


class TopologyError(DascgdError, ValueError):
    """A weight matrix could not be built or is not doubly stochastic."""


class NumericalError(DascgdError, RuntimeError):
    """An iterative numerical routine failed (singular solve, no convergence)."""


class DivergenceError(NumericalError):
    """An iterate became non-finite during a run."""

    def __init__(self, message, round_index=None):
        super().__init__(message)
        self.round_index = round_index
