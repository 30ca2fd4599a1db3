"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when caller-supplied data or configuration violates a precondition."""


class NumericError(RuntimeError):
    """Raised when a numerical routine fails (singular matrix, failed quadrature, ...)."""
