"""Exception types shared across the package."""


class FormatError(ValueError):
    """A volume file (raw or NRRD) is malformed or outside the supported subset."""


class InconsistencyError(RuntimeError):
    """An internal cross-check failed.

    Raised when an exact integer division leaves a remainder, when two
    projection routes disagree on the same moment, or when a derived
    covariance is not positive semi-definite.  Any of these signals a bug,
    not bad input.
    """
