class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class OutOfRangeError(ArithmeticError):
    """A result exceeds the binary64 range and cannot be reported as a finite margin."""
