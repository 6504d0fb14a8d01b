"""Exception types shared across the package."""


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class NonSquareError(ToolkitError):
    """A square matrix was required."""


class NotHermitianError(ToolkitError):
    """Hermiticity residual exceeds the accepted tolerance."""


class NoConvergenceError(ToolkitError):
    """The eigensolver failed to converge."""


class ShapeMismatchError(ToolkitError):
    """Matrix shape is inconsistent with the declared register dimensions."""


class EmptyKeepSetError(ToolkitError):
    """A partial trace must keep at least one register."""


class NotAPermutationError(ToolkitError):
    """Register reordering requires a permutation of 0..k-1."""


class InvalidDimensionError(ToolkitError):
    """A register dimension must be a positive integer."""


class DimensionMismatchError(ToolkitError):
    """Game and strategy operate on incompatible registers."""


class ValidationFailedError(ToolkitError):
    """An object failed validation; carries the diagnostic report."""

    def __init__(self, report, message: str = "validation failed"):
        super().__init__(f"{message}:\n{report}")
        self.report = report


class UnsupportedAnswerAlphabetError(ToolkitError):
    """The optimizer only handles binary answer alphabets."""


class FileFormatError(ToolkitError):
    """A game or strategy file could not be parsed."""
