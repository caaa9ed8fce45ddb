"""Exception types shared across the package."""


class NumericError(ArithmeticError):
    """A numerical step failed (non-finite data, singular system, failed factorization)."""


class FieldFormatError(ValueError):
    """A field, dictionary or config file does not follow the expected layout."""
