"""Exception types shared across the package."""


class RejectedInput(ValueError):
    """Input violates an operation's preconditions."""


class FormatError(RejectedInput):
    """A text file (.uhg, decomposition, config) failed to parse."""


class CapExceeded(RuntimeError):
    """The requested search is larger than the configured size cap."""
