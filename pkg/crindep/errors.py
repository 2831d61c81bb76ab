"""Exception and warning types for crindep.

Every error raised on purpose by the package derives from ``CrindepError``
so callers (and the command line) can catch the whole family at once.
Errors about bad inputs additionally derive from ``ValueError``.
"""


class CrindepError(Exception):
    """Base error for crindep."""


class InputValidationError(CrindepError, ValueError):
    """Arguments violate the documented contract."""


class SampleValidationError(InputValidationError):
    """Times/causes do not form a valid competing-risks sample."""


class InsufficientDataError(InputValidationError):
    """Too few observations for the requested statistic."""


class ModelParameterError(InputValidationError):
    """Lifetime model or family parameters are out of range."""


class FamilyValidityError(ModelParameterError):
    """The dependent family has a negative sub-density somewhere."""


class ConfigError(InputValidationError):
    """A configuration object or environment override is invalid."""


class IngestionError(InputValidationError):
    """A CSV file could not be turned into a sample."""


class HazardUndefinedError(CrindepError, ValueError):
    """Hazard requested where the survival function is already zero."""


class TruncationError(CrindepError):
    """The requested tail bound cannot be reached on a finite support."""


class NumericalStabilityError(CrindepError, FloatingPointError):
    """A numerical invariant was violated."""


class CovarianceError(NumericalStabilityError):
    """Assembled covariance matrix is not positive semi-definite."""


class UndefinedTestError(CrindepError):
    """The asymptotic test is not defined for this sample."""


class DegenerateVarianceError(CrindepError):
    """The estimated null variance is zero within tolerance."""


class TruncationWarning(UserWarning):
    """Issued when a truncated law neglects more tail mass than advised."""
