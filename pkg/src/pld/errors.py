"""Exception hierarchy shared by the library and the command line."""


class PLDError(Exception):
    """Base class for all library errors."""


class ConfigError(PLDError, ValueError):
    """Invalid hyperparameter or configuration value."""


class DataError(PLDError, ValueError):
    """Malformed input data (ragged CSV, bad cell, unusable column)."""

    def __init__(self, message, row=None, column=None):
        if row is not None or column is not None:
            message = f"{message} (row {row}, column {column!r})"
        super().__init__(message)
        self.row = row
        self.column = column


class SchemaError(PLDError):
    """Input columns do not match the predicate language of a model."""


class ParseError(PLDError):
    """A rule file or config file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ModelIntegrityError(PLDError):
    """A model lacks data an operation relies on (e.g. baseline rules)."""


class OracleRefusal(PLDError):
    """The exhaustive oracle refuses inputs that would blow up."""


class PartialResultError(PLDError):
    """Learning aborted at the node cap; carries what was learned so far."""

    def __init__(self, message, model, level, target):
        super().__init__(message)
        self.model = model
        self.level = level
        self.target = target
