"""Exception types raised by the completion library."""


class CompletionError(Exception):
    """Base class for all library errors."""


class ShapeError(CompletionError, ValueError):
    pass


class BoundsError(CompletionError, IndexError):
    pass


class RankError(CompletionError, ValueError):
    pass


class DomainError(CompletionError, ValueError):
    pass


class ScaleError(CompletionError, ValueError):
    """Raised when a normalizing norm is zero."""


class PreconditionError(CompletionError, ValueError):
    pass


class ConvergenceError(CompletionError, RuntimeError):
    pass


class MembershipError(CompletionError, KeyError):
    pass


class DegenerateSplitError(CompletionError, ValueError):
    pass


class ConfigurationError(CompletionError, ValueError):
    pass


class DegenerateDirectionError(CompletionError, ArithmeticError):
    """A power step produced the zero vector."""


class InitializationError(CompletionError, RuntimeError):
    pass


class DegenerateUpdateError(CompletionError, ArithmeticError):
    """An alternating-minimization update produced the zero vector."""


class ParseError(CompletionError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
