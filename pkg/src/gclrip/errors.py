"""Exception types shared across the analysis modules."""

from __future__ import annotations

from typing import Optional

from .ast import Span


class GclError(Exception):
    """Base class for all analysis errors."""


class GclSyntaxError(GclError):
    """Malformed source text; carries the 1-based position of the problem."""

    def __init__(self, message: str, span: Optional[Span] = None):
        self.span = span
        where = f" at {span}" if span else ""
        super().__init__(f"syntax error{where}: {message}")


class EvalError(GclError):
    """Base class for runtime evaluation failures."""


class UnboundVariableError(EvalError):
    pass


class IndexOutOfBoundsError(EvalError):
    pass


class DivisionByZeroError(EvalError):
    pass


class MarkerNotGroundError(EvalError):
    """A postcondition marker was evaluated without an interpretation."""


class DomainTooLargeError(GclError):
    pass


class DomainError(GclError):
    """The domain specification does not cover a required variable."""


class MissingAnnotationError(GclError):
    pass


class NondeterministicChoiceError(GclError):
    """More than one guard of a construct held during analysis."""


class NoDifferenceError(GclError):
    pass


class MultipleDifferencesError(GclError):
    pass


class ShapeMismatchError(GclError):
    pass
