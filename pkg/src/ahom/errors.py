class AhomError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(AhomError, ValueError):
    pass


class ParameterError(AhomError, ValueError):
    pass


class NumericError(AhomError, ArithmeticError):
    pass


class ParseError(AhomError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
