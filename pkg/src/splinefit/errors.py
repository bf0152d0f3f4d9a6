"""Exception hierarchy shared by the library and the command line front end."""


class SplineError(Exception):
    """Base class for all errors raised by splinefit."""


class ArgumentError(SplineError, ValueError):
    """A caller supplied arguments that violate an operation's preconditions."""


class DomainError(SplineError, ValueError):
    """A parameter lies outside the evaluation domain of a spline space."""

    def __init__(self, message, interval=None, index=None):
        super().__init__(message)
        self.interval = interval
        self.index = index


class FitInfeasibleError(SplineError):
    """The least-squares problem cannot be posed for the given data and space."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class RankDeficientError(FitInfeasibleError):
    """The normal matrix is singular or numerically rank deficient."""

    def __init__(self, message, rank=None, empty_support=()):
        super().__init__(message)
        self.rank = rank
        self.empty_support = tuple(empty_support)


class InputError(SplineError):
    """An input file could not be read or parsed."""

    def __init__(self, message, offset=None, line=None):
        super().__init__(message)
        self.offset = offset
        self.line = line


class ExtractionError(SplineError):
    """No usable contour could be extracted from an image."""
