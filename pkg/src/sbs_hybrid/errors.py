"""Exception types raised across the package."""


class SbsError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(SbsError, ValueError):
    pass


class SizeLimitError(SbsError, ValueError):
    pass


class DomainError(SbsError, ValueError):
    pass


class ConfigurationError(SbsError, ValueError):
    pass


class RankDeficiencyError(SbsError, ValueError):
    pass


class SamplingStuckError(SbsError, RuntimeError):
    pass


class DegenerateSelectionError(SbsError, RuntimeError):
    """Selected dictionary columns became numerically dependent."""

    def __init__(self, message, iteration):
        super().__init__(message)
        self.iteration = iteration


class BlockPrecodingError(SbsError):
    """One or more columns of a symbol block failed to precode.

    ``failures`` maps column index to the underlying exception and
    ``solutions`` holds the results for every column, with ``None`` at the
    failed positions.
    """

    def __init__(self, failures, solutions):
        cols = ", ".join(str(t) for t in sorted(failures))
        super().__init__(f"precoding failed for column(s) {cols}: "
                         + "; ".join(f"[{t}] {e}" for t, e in sorted(failures.items())))
        self.failures = failures
        self.solutions = solutions
