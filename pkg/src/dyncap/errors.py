"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input rejected before any computation (bad arguments, malformed specs)."""


class InvariantViolation(RuntimeError):
    """A numerical invariant broke mid-computation, beyond rounding tolerance."""
