"""Exception types used across the package."""


class IllConditionedError(RuntimeError):
    """A least-squares quantity could not be computed reliably.

    Raised when a required energy term sits at or below the configured
    regularization floor while the update it feeds has a nonzero numerator,
    or when a Gram system is singular beyond the ridge rescue.
    """


class InsufficientDataError(ValueError):
    """Not enough blocks have been processed for the requested operation."""
