"""Exception types shared across the package.

The CLI maps these onto exit codes: usage problems (bad flags, bad config
keys, API misuse) exit 1, data problems (malformed files, violated domain
preconditions) exit 2.
"""


class UsageError(ValueError):
    """Caller asked for something the API does not offer (bad key, bad id,
    wrong call sequence)."""


class DomainError(ValueError):
    """A numeric argument is outside the mathematical domain of the
    operation (non-finite input, sampling point on or outside the
    measurement circle, kernel singularity)."""


class PreconditionError(ValueError):
    """A geometric precondition is violated (source support not strictly
    inside the sensor circle, sensor inside the support)."""


class ParseError(ValueError):
    """A file being read is malformed; the message names the offending
    row or key."""
