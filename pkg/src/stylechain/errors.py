"""Exception types shared across the package."""


class StylechainError(Exception):
    """Base class for all package errors."""


class MalformedToken(StylechainError):
    def __init__(self, line, column, lexeme, reason=""):
        self.line = line
        self.column = column
        self.lexeme = lexeme
        self.reason = reason
        msg = f"line {line}, col {column}: bad token {lexeme!r}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class EmptyCorpus(StylechainError):
    pass


class OrderNotPositive(StylechainError):
    pass


class SequenceTooShort(StylechainError):
    def __init__(self, index, length, order):
        self.index = index
        super().__init__(
            f"sequence {index} has length {length}, need at least {order + 1} "
            f"for order {order}"
        )


class DeadEnd(StylechainError):
    def __init__(self, position, context):
        self.position = position
        self.context = context
        super().__init__(f"no outgoing transition from context {context} at position {position}")


class UnknownToken(StylechainError):
    def __init__(self, position, token):
        self.position = position
        self.token = token
        super().__init__(f"token {token} at position {position} not in model alphabet")


class Infeasible(StylechainError):
    """No sequence satisfies the constraint set.

    Carries which constraint family emptied the search space when known.
    """

    def __init__(self, message="constraint set admits no sequence", family=None, detail=None):
        self.family = family
        self.detail = detail
        super().__init__(message)


class UnreachableTotal(StylechainError):
    pass


class UnboundedLength(StylechainError):
    pass


class GridMismatch(StylechainError):
    pass


class UnsupportedConstraint(StylechainError):
    """Raised for constraint families the engine deliberately rejects."""
