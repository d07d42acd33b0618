"""Exception types raised by the library."""


class ExpsumError(Exception):
    """Base class for all library errors."""


class CompositeModulus(ExpsumError, ValueError):
    pass


class EvenModulus(ExpsumError, ValueError):
    pass


class LengthMismatch(ExpsumError, ValueError):
    pass


class BoundViolation(ExpsumError, AssertionError):
    pass


class IdentityViolation(ExpsumError, AssertionError):
    pass


class ZeroForm(ExpsumError, ValueError):
    pass


class WorkBudgetExceeded(ExpsumError, RuntimeError):
    pass


class NotCoprime(ExpsumError, ValueError):
    pass


class PreconditionViolated(ExpsumError, ValueError):
    def __init__(self, name: str, condition: str):
        super().__init__(f"{name}: precondition violated: {condition}")
        self.name = name
        self.condition = condition


class TrivialCharacter(ExpsumError, ValueError):
    pass


class PoleAtOne(ExpsumError, ValueError):
    pass


class UnsupportedPair(ExpsumError, ValueError):
    pass


class Infeasible(ExpsumError, RuntimeError):
    pass


class Unbounded(ExpsumError, RuntimeError):
    pass


class ParseError(ExpsumError, ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
