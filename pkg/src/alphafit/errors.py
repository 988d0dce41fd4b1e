"""Exception hierarchy shared by every module."""


class AlphaFitError(Exception):
    """Base class for all library errors."""


class DomainError(AlphaFitError, ValueError):
    """Input lies outside the domain of an operation."""


class ParseError(AlphaFitError, ValueError):
    """Text or binary input could not be parsed."""


class PrecisionExhaustedError(AlphaFitError):
    """A shift or decode asked for more bits than the value carries."""

    def __init__(self, message, max_valid=None):
        super().__init__(message)
        # largest index (bit count or sample index) that would have succeeded
        self.max_valid = max_valid


class UnitOverflowError(AlphaFitError, ArithmeticError):
    """A non-wrapping add/sub/mul_small left the unit interval."""


class CapacityError(AlphaFitError):
    """The requested precision budget exceeds the configured limit."""


class ShapeError(AlphaFitError, ValueError):
    """Array or modality dimensions are inconsistent."""
