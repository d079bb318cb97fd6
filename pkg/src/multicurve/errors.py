"""Exception hierarchy shared by every module."""

from __future__ import annotations


class MulticurveError(Exception):
    """Base class for all library errors."""


class InputError(MulticurveError, ValueError):
    """Malformed or missing input data."""


class DomainError(MulticurveError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class OrderingError(DomainError):
    """Dates supplied in the wrong order."""


class ScheduleError(MulticurveError, ValueError):
    pass


class ParseError(InputError):
    """Quote file problem; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ContextError(MulticurveError, KeyError):
    """A pricing context cannot resolve a curve, fixing or FX rate."""

    def __init__(self, key):
        self.key = key
        super().__init__(key)

    def __str__(self) -> str:
        return f"unresolved pricing key: {self.key!r}"


class BracketingError(MulticurveError, ValueError):
    """Root finder called on an interval without a sign change."""


class ConvergenceError(MulticurveError, RuntimeError):
    """An iteration hit its budget; ``best`` holds the best iterate found."""

    def __init__(self, message: str, best=None, iterations: int | None = None):
        self.best = best
        self.iterations = iterations
        super().__init__(message)
