"""Exception hierarchy shared by every engine."""


class PalgError(Exception):
    """Base class for all errors raised by palg."""


class DimensionError(PalgError, ValueError):
    """Operands live in different dimensions (or an index is out of range)."""


class CapacityError(PalgError):
    """A computation would exceed one of the fixed size bounds."""


class UnsupportedOperation(PalgError):
    """The operation is not defined for this kind of algebra."""


class MalformedInput(PalgError, ValueError):
    """An input object violates its documented shape or invariants."""


class UnboundVariable(PalgError, KeyError):
    pass


class ParseError(PalgError, ValueError):
    """Syntax error with the byte offset and the set of expected tokens."""

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at byte {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)
