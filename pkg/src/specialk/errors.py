"""Exception types shared across the package."""


class SpecialKError(Exception):
    """Base class for all errors raised by specialk."""


class InvalidArgumentError(SpecialKError, ValueError):
    """An argument violates an operation's precondition."""


class NumericError(SpecialKError, ArithmeticError):
    """A numerical routine failed (non-convergence, degenerate input)."""


class ParseError(SpecialKError, ValueError):
    """Malformed input file.

    ``row`` and ``column`` are 1-based and may be None when the problem is
    not tied to a single cell (e.g. an empty file).
    """

    def __init__(self, message, path=None, row=None, column=None):
        self.path = path
        self.row = row
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
