"""Exception hierarchy.

The command-line front end maps these onto exit codes: validation
problems exit with 2, fitting/convergence problems with 3 and missing or
unreadable files with 4.
"""


class WindSolarError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ValidationError(WindSolarError, ValueError):
    """Input violates a documented precondition or invariant."""

    exit_code = 2


class ParameterDomainError(ValidationError):
    pass


class InfeasibleMomentsError(ValidationError):
    pass


class DimensionError(ValidationError):
    pass


class ConfigurationError(ValidationError):
    pass


class DataFormatError(ValidationError):
    pass


class DataQualityError(ValidationError):
    pass


class ConditioningError(ValidationError):
    """Covariance matrix could not be factorized even after jitter."""


class FitError(WindSolarError):
    exit_code = 3


class TailSparsityError(FitError):
    pass


class EstimationError(FitError):
    pass


class DegenerateRegionError(FitError):
    pass


class PropagationError(FitError):
    pass


class DependencyError(WindSolarError, FileNotFoundError):
    """A prerequisite artifact file is missing."""

    exit_code = 4
