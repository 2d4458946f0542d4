"""Exception hierarchy shared by the engine and the command line."""


class ConfBettiError(Exception):
    """Base class for every error raised by the package."""


class UsageError(ConfBettiError, ValueError):
    """Bad arguments: mixed algebras, out-of-range parameters, unknown presets."""


class ValidationError(ConfBettiError, ValueError):
    """Input data violates a structural invariant (e.g. non-associative cup product)."""


class UnsupportedInputError(ValidationError):
    """Input is well formed but lies outside what the construction supports."""


class ConsistencyError(ConfBettiError, RuntimeError):
    """Internal bookkeeping disagreed with itself; indicates a bug, not bad input."""
