"""Exception and warning types shared across the package."""


class AgufsError(Exception):
    """Base class for solver and I/O failures raised by this package."""


class NumericError(AgufsError):
    """A computation produced non-finite values or an unusable matrix."""


class NotPositiveDefiniteError(NumericError):
    """A matrix required to be positive definite is not, beyond tolerance."""


class ParseError(AgufsError):
    """A data file could not be parsed; message carries the line number."""


class DegenerateSolutionWarning(UserWarning):
    """A subproblem had a non-unique optimum; a valid representative was kept."""
