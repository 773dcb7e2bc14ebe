"""Exceptions shared across modules."""


class RoomsenseError(Exception):
    """Base class for all package errors."""


class ShapeError(RoomsenseError, ValueError):
    """A vector or row has the wrong number of readings."""


class ParseError(RoomsenseError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyClass(RoomsenseError, ValueError):
    """A class has too few samples for the requested operation."""


class EmptyDataset(RoomsenseError, ValueError):
    pass


class EmptySet(RoomsenseError, ValueError):
    pass


class ConfigError(RoomsenseError, ValueError):
    pass
