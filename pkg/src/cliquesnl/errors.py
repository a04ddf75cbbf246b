"""Exception and warning types shared across the package."""


class SnlError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(SnlError):
    """An argument violates a documented precondition."""


class DimensionMismatch(SnlError):
    """Array shapes are inconsistent with each other or with the ambient dimension."""


class InternalError(SnlError):
    """An internal consistency check failed; indicates a bug, not bad input."""


class ParseError(SnlError):
    """A graph file could not be parsed.  Carries the 1-based line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DisconnectedConfiguration(SnlError):
    """The patch system does not couple every unknown to the anchors.

    Raised when the registration operator would be singular.  The offending
    component (list of sensor ids / patch indices) is carried in ``components``.
    """

    def __init__(self, message, components=()):
        super().__init__(message)
        self.components = tuple(components)


class DegenerateRoundingWarning(UserWarning):
    """Orthogonal projection was applied to a numerically rank-deficient matrix."""


class DegenerateGramWarning(UserWarning):
    """A Gram matrix had numerical rank below the ambient dimension at rounding."""
