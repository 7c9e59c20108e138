"""Exception hierarchy shared by all modules."""


class DomainError(ValueError):
    """Input violates an operation's precondition."""


class ParseError(DomainError):
    """Malformed monomial/polynomial/code-spec text."""


class CapExceeded(DomainError):
    """Request exceeds a computational cap (evaluation m, orbit m, code dimension)."""

    def __init__(self, what, value, cap, hint=""):
        self.what = what
        self.value = value
        self.cap = cap
        msg = f"{what}={value} exceeds cap {cap}"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)


class InvariantViolation(AssertionError):
    """An internal identity failed. Signals a bug or a counterexample, never bad input."""


class CollisionQuotientError(InvariantViolation):
    """|O_i|*|O_j| / |O_i + O_j| is not a power of two."""

    def __init__(self, size_i, size_j, sum_size):
        self.size_i = size_i
        self.size_j = size_j
        self.sum_size = sum_size
        super().__init__(
            f"Minkowski quotient {size_i}*{size_j}/{sum_size} is not a power of two"
        )
