"""Exception types shared across the package.

All of these derive from ValueError so callers that do not care about the
distinction can catch one base class.
"""


class ConfigurationError(ValueError):
    """A parameter combination is physically or numerically unusable."""


class PreconditionError(ValueError):
    """An operator contract was violated (e.g. a matrix is not unitary)."""


class DegenerateInputError(ValueError):
    """Input carries no usable signal (zero norm, all-zero density)."""


class EmptyWindowError(ValueError):
    """A post-selection window selects nothing."""
