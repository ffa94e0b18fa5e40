"""Exception types shared across the package."""


class PrscoreError(ValueError):
    """Base class for all errors raised by prscore."""


class ParseError(PrscoreError):
    """Input could not be parsed (malformed line, empty input, bad JSON)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvariantError(PrscoreError):
    """A value parsed fine but violates a domain invariant."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
