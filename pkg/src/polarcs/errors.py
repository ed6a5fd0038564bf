"""Exception hierarchy."""


class PolarCSError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDimensionError(PolarCSError, ValueError):
    pass


class DimensionMismatchError(PolarCSError, ValueError):
    pass


class DegenerateArcError(PolarCSError, ValueError):
    pass


class EmptyFrequencySetError(PolarCSError, ValueError):
    pass


class SolverError(PolarCSError):
    pass


class InfeasibleError(SolverError):
    """The residual bound cannot be met by any admissible coefficient set."""

    def __init__(self, message, min_residual=None):
        super().__init__(message)
        self.min_residual = min_residual


class NoConvergenceError(SolverError):
    pass


class ExhaustedDictionaryError(PolarCSError):
    """Band exclusion removed every remaining candidate atom."""


class PackingInfeasibleError(PolarCSError, ValueError):
    pass


class EmptyInputError(PolarCSError, ValueError):
    pass


class ZeroSignalError(PolarCSError, ValueError):
    pass


class ConfigError(PolarCSError, ValueError):
    pass
