"""Exception hierarchy.

Each class carries the CLI exit code it maps to, so the command layer can
translate failures without a lookup table.
"""


class ElastikaError(Exception):
    exit_code = 5


class UsageError(ElastikaError, ValueError):
    exit_code = 2


class DomainError(UsageError):
    """A numeric argument is outside the domain of the operation."""


class ParseError(ElastikaError, ValueError):
    exit_code = 2

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class EmptyDatasetError(ParseError):
    pass


class DatasetGateError(ElastikaError, ValueError):
    """The dataset fails a benchmark filtering rule."""

    exit_code = 3


class VariableLengthError(DatasetGateError):
    pass


class SingletonClassError(DatasetGateError):
    pass


class SeriesTooShortError(UsageError):
    pass


class LengthMismatchError(UsageError):
    pass


class InvariantError(ElastikaError, AssertionError):
    exit_code = 5


class StorageError(ElastikaError, OSError):
    """A file could not be read or written."""

    exit_code = 4
