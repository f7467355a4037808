"""Exception hierarchy shared by every splitplan module."""


class SplitPlanError(Exception):
    """Base class for all library errors."""


class ParseError(SplitPlanError):
    """A profile or device document could not be read or is malformed."""


class ValidationError(SplitPlanError, ValueError):
    """A value violates a documented invariant."""


class ShapeMismatch(ValidationError):
    """A layer cannot consume the tensor shape produced by its predecessor."""


class InvalidInstance(ValidationError):
    """A problem instance cannot be evaluated (bad profile or non-positive rate)."""


class IndexOutOfRange(SplitPlanError, IndexError):
    """A split index lies outside the range an operation accepts."""


class NoFeasibleSolution(SplitPlanError):
    """No candidate satisfies the constraints."""


class InvalidMatrix(ValidationError):
    """A decision matrix holds negative or non-finite entries."""
