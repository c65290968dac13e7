"""
Exception types shared by the library and the command-line tools.
"""


class GeoSublinearError(Exception):
    """Base class for errors raised by this package."""


class DatasetParseError(GeoSublinearError, ValueError):
    """A dataset file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RefusalError(GeoSublinearError):
    """
    A principled refusal: the request is well formed but exceeds a budget
    or the instance admits no feasible answer.
    """

    def __init__(self, message: str, reason: str = "budget"):
        self.reason = reason
        super().__init__(message)


class UsageError(GeoSublinearError):
    """Invalid command-line usage."""


class DigestMismatchError(GeoSublinearError):
    """A report was checked against a dataset it was not computed on."""
