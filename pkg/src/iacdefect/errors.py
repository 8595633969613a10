"""Exceptions shared across the pipeline, mapped to CLI exit codes."""


class DataError(ValueError):
    """Input data violates a contract (duplicate ids, bad labels, malformed files)."""


class EmptyInputError(RuntimeError):
    """An input source contained nothing to process."""
