"""Exception types raised across the sparrow package."""


class SparrowError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SparrowError):
    """An input fell outside the domain an operation is defined on."""


class ValidationError(SparrowError):
    """A structured input violated one of its invariants."""


class SizeError(SparrowError):
    """A problem instance exceeds the size limit of an exact solver."""


class OutOfReachError(SparrowError):
    """A spray target lies beyond the turret's maximum ground reach."""

    def __init__(self, message, partial_log=None):
        super().__init__(message)
        self.partial_log = partial_log


class ScenarioError(SparrowError):
    """A scenario document failed to parse or violated an invariant.

    ``line`` is the 1-based line number for parse errors, None for
    whole-document invariant violations.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NoRowError(SparrowError):
    """The row extractor found no crop row in a segmentation mask."""
