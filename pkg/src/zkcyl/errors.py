"""Exception types shared across the solver."""


class ConfigurationError(ValueError):
    """Invalid grid, layout, or run configuration."""


class SolverFailure(RuntimeError):
    """Nonlinear solve (Newton-Krylov) stagnated or diverged."""

    def __init__(self, message, residual_norm=None, iterations=None):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.iterations = iterations


class StepFailure(RuntimeError):
    """Implicit stage iteration did not converge within the iteration budget."""

    def __init__(self, message, t=None, iterations=None, increment=None):
        super().__init__(message)
        self.t = t
        self.iterations = iterations
        self.increment = increment


class SnapshotError(ValueError):
    """Snapshot file is malformed, truncated, or fails its checksum."""
