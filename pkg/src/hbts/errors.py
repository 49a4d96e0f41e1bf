"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Array dimensions do not match the declared site structure."""


class ValidationError(ValueError):
    """An operator violates its structural invariants (isometry, hermiticity, ...)."""


class ResourceLimitError(RuntimeError):
    """A dense construction would exceed the configured memory budget."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class DegenerateFixedPointError(RuntimeError):
    """A channel's unit eigenvalue is degenerate; its stationary state is not unique."""

    def __init__(self, message, multiplicity):
        super().__init__(message)
        self.multiplicity = multiplicity


class KernelNotFoundError(RuntimeError):
    """No reduced state up to the supported interaction length has a nontrivial kernel.

    Theory guarantees a kernel at interaction length 3 (d >= 3) or 4 (d = 2),
    so hitting this signals a numerical-tolerance problem, not physics.
    """
