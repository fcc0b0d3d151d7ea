"""Exception hierarchy shared by the library and the command line."""


class HpFilterError(Exception):
    """Base class for all errors raised by :mod:`hpfilt`."""


class DimensionError(HpFilterError, ValueError):
    """Input has the wrong length or shapes do not agree."""


class ParameterError(HpFilterError, ValueError):
    """A tuning parameter is outside its legal range."""


class StateError(HpFilterError, ValueError):
    """An incremental state was advanced inconsistently."""


class DegenerateSeriesError(HpFilterError, ArithmeticError):
    """The first-stage cycle has zero l1 norm, so SI is undefined."""


class DataError(HpFilterError):
    """Base for problems with input data files."""


class SchemaError(DataError):
    """A required CSV column is missing."""


class ParseError(DataError):
    """A CSV cell could not be parsed; ``row`` is the 1-based data row."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class OrderingError(DataError):
    """Dates are not strictly increasing."""


class DomainError(DataError, ValueError):
    """A value is outside the domain of a transform (e.g. log of <= 0)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
