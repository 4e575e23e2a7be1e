class AlgebraError(Exception):
    """Base class for every error raised by the services package."""


class ParseError(AlgebraError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class RingMismatchError(AlgebraError):
    pass


class NotDivisibleError(AlgebraError):
    pass


class NotInIdealError(AlgebraError):
    pass


class NotBorelError(AlgebraError):
    pass


class InvalidInputError(AlgebraError):
    pass


class SizeLimitError(AlgebraError):
    pass


class ConsistencyError(AlgebraError):
    """An invariant that the theory guarantees was found violated."""
