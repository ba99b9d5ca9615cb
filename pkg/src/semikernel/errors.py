"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """An iterative solver did not converge."""


class AccuracyError(RuntimeError):
    """A quadrature missed its error target.

    The best available estimate is kept on the exception so callers can
    decide whether it is still usable.
    """

    def __init__(self, message, value=None, est_err=None):
        super().__init__(message)
        self.value = value
        self.est_err = est_err


class ConfigurationError(ValueError):
    """Invalid configuration for an oracle or a study."""


class FitError(ValueError):
    """Too few usable rows for a regression."""


class StudyError(RuntimeError):
    """A study produced too many failed rows to be trusted."""
