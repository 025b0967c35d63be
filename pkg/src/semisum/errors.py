"""Exception hierarchy shared by every module."""


class UalgError(Exception):
    """Base class for all errors raised by semisum."""


class ParseError(UalgError, ValueError):
    """Malformed signature, term, formula or file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SignatureError(UalgError, ValueError):
    """A signature is invalid or unsuitable for the requested operation."""


class UnboundVariableError(UalgError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unbound variable"


class BudgetExceeded(UalgError):
    """The instance is beyond desk scale; not a logical failure."""


class SizeLimitError(UalgError, ValueError):
    """An exhaustive routine was asked to run past its size guard."""


class ConstructionError(UalgError, ValueError):
    """Invalid input to a construction, carrying the offending witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotACongruenceError(ConstructionError):
    pass
