"""Exception hierarchy shared by every gplus module."""

from __future__ import annotations


class GPlusError(Exception):
    """Base class for all data and validation errors raised by gplus."""


class MalformedLabel(GPlusError, ValueError):
    pass


class ParseError(GPlusError, ValueError):
    """A row or field could not be parsed; carries the file and line number."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{where}{message}")


class BadDate(ParseError):
    pass


class IntegrityError(GPlusError, ValueError):
    """Dangling cross-reference or duplicate key."""


class DimensionError(GPlusError, ValueError):
    """A fingerprint has the wrong number of levels or is missing a primitive."""


class DimensionMismatch(DimensionError):
    """Operands of a fingerprint operation have different dimensions."""


class EmptyInput(GPlusError, ValueError):
    pass


class InsufficientData(GPlusError, ValueError):
    pass


class PrimitiveCountWarning(UserWarning):
    """Primitive counts differ from the 33 skills / 52 abilities / 35 knowledge default."""


class UnknownKey(GPlusError, KeyError):
    """A requested occupation, task or activity is not in the dataset."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""
