"""Exception hierarchy shared across the package."""


class TriqError(Exception):
    """Base class for all errors raised by triq."""


class DivisionByZero(TriqError, ZeroDivisionError):
    pass


class FieldMismatch(TriqError, TypeError):
    """Operands live over different base fields."""


class UnsupportedSpectrum(TriqError, ValueError):
    """The characteristic polynomial does not split over Q(sqrt(3))."""


class UnsupportedField(TriqError, ValueError):
    """The operation needs a small prime field (brute-force paths)."""


class PreconditionViolated(TriqError, ValueError):
    pass


class BadIndex(TriqError, ValueError):
    pass


class NoPositivePolarization(TriqError, ArithmeticError):
    pass


class SigmaUndefined(TriqError):
    """An involution is not defined at the given point.

    ``map_index`` is the involution that failed; ``stage`` is set by
    composite maps (1 for the first map applied, 2 for the second).
    """

    def __init__(self, message, *, map_index=None, stage=None):
        super().__init__(message)
        self.map_index = map_index
        self.stage = stage


class NotOnVariety(SigmaUndefined):
    pass


class DegenerateFiber(SigmaUndefined):
    pass


class ParseError(TriqError, ValueError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class DuplicateIndex(ParseError):
    pass


class BadField(ParseError):
    pass


class NonPrimeModulus(BadField):
    pass
