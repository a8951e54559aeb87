"""Exception types shared across the package."""


class DimensionError(ValueError):
    """A matrix or vector argument has an incompatible shape."""


class DataError(ValueError):
    """A dataset could not be ingested, or became empty after preprocessing."""


class DegenerateProblemError(ValueError):
    """The problem instance carries no signal (for example, all-zero data)."""


class DiagnosticUnavailableError(ValueError):
    """A diagnostic is undefined at the given point (for example, non-positive
    group variances)."""


class NumericalError(RuntimeError):
    """A solver produced non-finite values or lost manifold feasibility."""
