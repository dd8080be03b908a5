"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the domain where a map or curve is defined."""

    def __init__(self, message, threshold=None):
        super().__init__(message)
        self.threshold = threshold


class HypothesisError(ValueError):
    """A named analytic hypothesis (H1, H2, ...) does not hold."""

    def __init__(self, condition, message=None):
        super().__init__(message or f"hypothesis {condition} is not satisfied")
        self.condition = condition


class PreconditionError(ValueError):
    """A point passed as a fixed point does not satisfy the fixed-point residual."""
